#include "gal/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gal/errors.hpp"

namespace gal {

namespace {

Matrix normalize_rows_unit(const Matrix& h) {
  Matrix out(h.rows, h.cols);
  for (std::size_t i = 0; i < h.rows; ++i) {
    double nrm = 0.0;
    for (std::size_t j = 0; j < h.cols; ++j) nrm += h(i, j) * h(i, j);
    const double inv = 1.0 / (std::sqrt(nrm) + 1e-12);
    for (std::size_t j = 0; j < h.cols; ++j) out(i, j) = h(i, j) * inv;
  }
  return out;
}

void softmax_row(double* logits, std::size_t c) {
  double mx = logits[0];
  for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, logits[j]);
  double sum = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    logits[j] = std::exp(logits[j] - mx);
    sum += logits[j];
  }
  for (std::size_t j = 0; j < c; ++j) logits[j] /= sum;
}

}  // namespace

ProbeModel train_probe(const Matrix& h, const std::vector<std::pair<std::size_t, int>>& labeled,
                       int num_classes, const ProbeConfig& cfg) {
  if (labeled.empty()) throw DataError("train_probe: no labeled examples");
  if (num_classes < 1) throw DataError("train_probe: no classes");
  const std::size_t d = h.cols;
  const std::size_t c = static_cast<std::size_t>(num_classes);
  const std::size_t nt = labeled.size();

  Matrix x(nt, d);
  {
    const Matrix hn = normalize_rows_unit(h);
    for (std::size_t i = 0; i < nt; ++i)
      std::copy(hn.row(labeled[i].first), hn.row(labeled[i].first) + d, x.row(i));
  }

  ProbeModel model{Matrix(d, c), std::vector<double>(c, 0.0)};
  double prev_loss = std::numeric_limits<double>::infinity();
  Matrix probs(nt, c);

  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    probs = matmul(x, model.w);
    for (std::size_t i = 0; i < nt; ++i) {
      for (std::size_t j = 0; j < c; ++j) probs(i, j) += model.b[j];
      softmax_row(probs.row(i), c);
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < nt; ++i)
      loss -= std::log(std::max(probs(i, static_cast<std::size_t>(labeled[i].second)), 1e-300));
    loss /= static_cast<double>(nt);

    // residual = probs - onehot
    for (std::size_t i = 0; i < nt; ++i) probs(i, static_cast<std::size_t>(labeled[i].second)) -= 1.0;
    Matrix gw = matmul_tn(x, probs);
    const double scale = cfg.lr / static_cast<double>(nt);
    for (std::size_t i = 0; i < gw.size(); ++i) model.w.data[i] -= scale * gw.data[i];
    for (std::size_t j = 0; j < c; ++j) {
      double gb = 0.0;
      for (std::size_t i = 0; i < nt; ++i) gb += probs(i, j);
      model.b[j] -= scale * gb;
    }
    if (std::abs(prev_loss - loss) < cfg.tol) break;
    prev_loss = loss;
  }
  return model;
}

Matrix predict_proba(const ProbeModel& m, const Matrix& h) {
  if (h.cols != m.w.rows) throw std::invalid_argument("predict_proba: shape mismatch");
  Matrix logits = matmul(normalize_rows_unit(h), m.w);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    for (std::size_t j = 0; j < logits.cols; ++j) logits(i, j) += m.b[j];
    softmax_row(logits.row(i), logits.cols);
  }
  return logits;
}

std::vector<int> predict_labels(const ProbeModel& m, const Matrix& h) {
  const Matrix p = predict_proba(m, h);
  std::vector<int> out(p.rows);
  for (std::size_t i = 0; i < p.rows; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < p.cols; ++j)
      if (p(i, j) > p(i, best)) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

std::pair<double, double> f1_scores(const std::vector<int>& pred, const std::vector<int>& truth,
                                    int num_classes) {
  if (pred.size() != truth.size()) throw std::invalid_argument("f1_scores: length mismatch");
  const std::size_t c = static_cast<std::size_t>(num_classes);
  std::vector<std::size_t> tp(c, 0), fp(c, 0), fn(c, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= num_classes || truth[i] < 0 || truth[i] >= num_classes)
      throw std::invalid_argument("f1_scores: label out of range");
    if (pred[i] == truth[i]) {
      ++tp[static_cast<std::size_t>(truth[i])];
      ++correct;
    } else {
      ++fp[static_cast<std::size_t>(pred[i])];
      ++fn[static_cast<std::size_t>(truth[i])];
    }
  }
  const double micro = static_cast<double>(correct) / static_cast<double>(pred.size());
  double macro = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    const double denom = static_cast<double>(2 * tp[k] + fp[k] + fn[k]);
    macro += denom > 0.0 ? 2.0 * static_cast<double>(tp[k]) / denom : 0.0;
  }
  macro /= static_cast<double>(c);
  return {micro, macro};
}

HomophilyReport homophily_report(const Graph& g, const std::vector<std::size_t>& selected) {
  if (selected.empty()) throw std::invalid_argument("homophily_report: no selected nodes");
  HomophilyReport r;
  r.graph_mean = mean_graph_homophily(g);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t v : selected) {
    if (auto h = ego_homophily(g, v)) {
      sum += *h;
      ++count;
    }
  }
  r.selected_mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
  r.improvement_pct = r.graph_mean > 0.0
                          ? 100.0 * (r.selected_mean - r.graph_mean) / r.graph_mean
                          : 0.0;
  return r;
}

}  // namespace gal
