#include "gal/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gal {

namespace {

constexpr double kNormFloor = 1e-12;

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double norm(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

double theta_rows(const double* a, const double* b, std::size_t n, double tau) {
  const double c = dot(a, b, n) / ((norm(a, n) + kNormFloor) * (norm(b, n) + kNormFloor));
  return std::exp(c / tau);
}

// Rows scaled to unit norm (with floor); returns the pre-floor norms.
Matrix normalize_rows(const Matrix& u, std::vector<double>& norms) {
  Matrix out(u.rows, u.cols);
  norms.resize(u.rows);
  for (std::size_t i = 0; i < u.rows; ++i) {
    const double nu = norm(u.row(i), u.cols);
    norms[i] = nu;
    const double inv = 1.0 / (nu + kNormFloor);
    for (std::size_t j = 0; j < u.cols; ++j) out(i, j) = u(i, j) * inv;
  }
  return out;
}

}  // namespace

void PositiveSets::add_labeled(std::size_t v, int label) {
  for (std::size_t k = 0; k < labeled_.size(); ++k) {
    if (label_of_labeled_[k] == label) {
      sets_[labeled_[k]].push_back(v);
      sets_[v].push_back(labeled_[k]);
    }
  }
  std::sort(sets_[v].begin(), sets_[v].end());
  labeled_.push_back(v);
  label_of_labeled_.push_back(label);
}

double critic(const std::vector<double>& u, const std::vector<double>& v, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("critic: tau must be positive");
  if (u.size() != v.size()) throw std::invalid_argument("critic: dimension mismatch");
  return theta_rows(u.data(), v.data(), u.size(), tau);
}

double pairwise_loss(std::size_t i, const Matrix& u, const Matrix& v,
                     const ObjectiveConfig& cfg) {
  PositiveSets p(u.rows);
  return supervised_pairwise_loss(i, u, v, p, cfg);
}

double supervised_pairwise_loss(std::size_t i, const Matrix& u, const Matrix& v,
                                const PositiveSets& p, const ObjectiveConfig& cfg) {
  const std::size_t n = u.rows;
  if (n < 2) throw std::invalid_argument("pairwise loss: need at least 2 nodes");
  if (v.rows != n || v.cols != u.cols)
    throw std::invalid_argument("pairwise loss: view shape mismatch");
  const std::size_t d = u.cols;
  const double tau = cfg.tau;

  double num = theta_rows(u.row(i), v.row(i), d, tau);
  const auto& pos = p.of(i);
  std::vector<char> is_pos(n, 0);
  for (std::size_t q : pos) is_pos[q] = 1;
  for (std::size_t q : pos) {
    double s = theta_rows(u.row(i), u.row(q), d, tau);
    if (cfg.positives_from_both_views) s += theta_rows(u.row(i), v.row(q), d, tau);
    num += cfg.lambda * s;
  }

  double neg = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const bool excluded = cfg.exclude_positives_from_negatives && is_pos[j];
    if (!excluded) neg += theta_rows(u.row(i), u.row(j), d, tau);
    if (!(excluded && cfg.positives_from_both_views))
      neg += theta_rows(u.row(i), v.row(j), d, tau);
  }
  return std::log(num + neg) - std::log(num);
}

double total_objective(const Matrix& u, const Matrix& v, const PositiveSets& p,
                       const ObjectiveConfig& cfg) {
  const std::size_t n = u.rows;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // with lambda = 0 the supervised positives vanish, so the per-anchor
    // weight must also drop back to 1 for the Eq-3 reduction to hold
    const double np = cfg.lambda == 0.0 ? 0.0 : static_cast<double>(p.of(i).size());
    const double w = 1.0 / (np + 1.0);
    sum += w * (supervised_pairwise_loss(i, u, v, p, cfg) +
                supervised_pairwise_loss(i, v, u, p, cfg));
  }
  return sum / (2.0 * static_cast<double>(n));
}

double total_objective_grad(const Matrix& u, const Matrix& v, const PositiveSets& p,
                            const ObjectiveConfig& cfg, Matrix& du, Matrix& dv) {
  const std::size_t n = u.rows;
  if (n < 2) throw std::invalid_argument("total_objective: need at least 2 nodes");
  const double tau = cfg.tau;

  std::vector<double> nu, nv;
  const Matrix uh = normalize_rows(u, nu);
  const Matrix vh = normalize_rows(v, nv);

  Matrix theta_uu = matmul_nt(uh, uh);
  Matrix theta_uv = matmul_nt(uh, vh);
  Matrix theta_vv = matmul_nt(vh, vh);
  for (double& x : theta_uu.data) x = std::exp(x / tau);
  for (double& x : theta_uv.data) x = std::exp(x / tau);
  for (double& x : theta_vv.data) x = std::exp(x / tau);

  Matrix a_uu(n, n), a_uv(n, n), a_vv(n, n);
  double total = 0.0;

  std::vector<char> is_pos(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pos = p.of(i);
    const double np = cfg.lambda == 0.0 ? 0.0 : static_cast<double>(pos.size());
    const double c = (1.0 / (np + 1.0)) / (2.0 * static_cast<double>(n));
    for (std::size_t q : pos) is_pos[q] = 1;

    // anchor in view 1: l(u_i, v_i)
    {
      double num = theta_uv(i, i);
      for (std::size_t q : pos) {
        double s = theta_uu(i, q);
        if (cfg.positives_from_both_views) s += theta_uv(i, q);
        num += cfg.lambda * s;
      }
      double neg = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const bool excluded = cfg.exclude_positives_from_negatives && is_pos[j];
        if (!excluded) neg += theta_uu(i, j);
        if (!(excluded && cfg.positives_from_both_views)) neg += theta_uv(i, j);
      }
      const double den = num + neg;
      total += c * (std::log(den) - std::log(num));
      const double g_pos = c * (1.0 / den - 1.0 / num);
      const double g_neg = c / den;
      a_uv(i, i) += g_pos;
      for (std::size_t q : pos) {
        a_uu(i, q) += cfg.lambda * g_pos;
        if (cfg.positives_from_both_views) a_uv(i, q) += cfg.lambda * g_pos;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const bool excluded = cfg.exclude_positives_from_negatives && is_pos[j];
        if (!excluded) a_uu(i, j) += g_neg;
        if (!(excluded && cfg.positives_from_both_views)) a_uv(i, j) += g_neg;
      }
    }

    // anchor in view 2: l(v_i, u_i); theta(v_i, u_j) = theta_uv(j, i)
    {
      double num = theta_uv(i, i);
      for (std::size_t q : pos) {
        double s = theta_vv(i, q);
        if (cfg.positives_from_both_views) s += theta_uv(q, i);
        num += cfg.lambda * s;
      }
      double neg = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const bool excluded = cfg.exclude_positives_from_negatives && is_pos[j];
        if (!excluded) neg += theta_vv(i, j);
        if (!(excluded && cfg.positives_from_both_views)) neg += theta_uv(j, i);
      }
      const double den = num + neg;
      total += c * (std::log(den) - std::log(num));
      const double g_pos = c * (1.0 / den - 1.0 / num);
      const double g_neg = c / den;
      a_uv(i, i) += g_pos;
      for (std::size_t q : pos) {
        a_vv(i, q) += cfg.lambda * g_pos;
        if (cfg.positives_from_both_views) a_uv(q, i) += cfg.lambda * g_pos;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const bool excluded = cfg.exclude_positives_from_negatives && is_pos[j];
        if (!excluded) a_vv(i, j) += g_neg;
        if (!(excluded && cfg.positives_from_both_views)) a_uv(j, i) += g_neg;
      }
    }

    for (std::size_t q : pos) is_pos[q] = 0;
  }

  // dJ/dtheta -> dJ/dcos
  const double inv_tau = 1.0 / tau;
  for (std::size_t i = 0; i < n * n; ++i) {
    a_uu.data[i] *= theta_uu.data[i] * inv_tau;
    a_uv.data[i] *= theta_uv.data[i] * inv_tau;
    a_vv.data[i] *= theta_vv.data[i] * inv_tau;
  }

  // dJ/d(normalized rows)
  Matrix guh(n, u.cols), gvh(n, u.cols);
  {
    Matrix sym_uu(n, n), sym_vv(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        sym_uu(i, j) = a_uu(i, j) + a_uu(j, i);
        sym_vv(i, j) = a_vv(i, j) + a_vv(j, i);
      }
    guh = matmul(sym_uu, uh);
    axpy(1.0, matmul(a_uv, vh), guh);
    gvh = matmul(sym_vv, vh);
    axpy(1.0, matmul_tn(a_uv, uh), gvh);
  }

  // chain through the row normalization y = u / (|u| + floor)
  auto unnormalize = [](const Matrix& g, const Matrix& raw, const std::vector<double>& norms,
                        Matrix& out) {
    out = Matrix(g.rows, g.cols);
    for (std::size_t i = 0; i < g.rows; ++i) {
      const double nrm = norms[i];
      if (nrm == 0.0) continue;  // flat direction at the origin
      const double inv = 1.0 / (nrm + kNormFloor);
      const double gu = dot(g.row(i), raw.row(i), g.cols);
      const double corr = gu * inv * inv / nrm;
      for (std::size_t j = 0; j < g.cols; ++j)
        out(i, j) = g(i, j) * inv - corr * raw(i, j);
    }
  };
  unnormalize(guh, u, nu, du);
  unnormalize(gvh, v, nv, dv);

  return total;
}

}  // namespace gal
