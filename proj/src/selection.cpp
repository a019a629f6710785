#include "gal/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gal/errors.hpp"

namespace gal {

ALState ALState::init(std::size_t n, const std::vector<std::size_t>& pool, std::size_t budget) {
  ALState s;
  s.unlabeled = pool;
  std::sort(s.unlabeled.begin(), s.unlabeled.end());
  s.budget = budget;
  s.positives = PositiveSets(n);
  return s;
}

bool ALState::is_unlabeled(std::size_t v) const {
  return std::binary_search(unlabeled.begin(), unlabeled.end(), v);
}

void ALState::acquire(std::size_t v, int label) {
  auto it = std::lower_bound(unlabeled.begin(), unlabeled.end(), v);
  if (it == unlabeled.end() || *it != v)
    throw std::invalid_argument("acquire: node not in unlabeled pool");
  unlabeled.erase(it);
  labeled.emplace_back(v, label);
  positives.add_labeled(v, label);
  ++round;
}

namespace {

double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

}  // namespace

std::size_t minimax_select(const Graph& g, const Matrix& h, const ALState& state,
                           std::size_t k, Rng& rng) {
  if (state.unlabeled.empty()) throw DataError("minimax_select: empty unlabeled pool");
  if (h.rows != g.n) throw std::invalid_argument("minimax_select: embedding row count mismatch");

  std::size_t best = g.n;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t v : state.unlabeled) {
    const auto nbrs = k_hop_neighbors(g, v, k);
    if (nbrs.empty()) continue;  // undefined inner max
    double score = 0.0;
    for (std::size_t u : nbrs)
      score = std::max(score, squared_distance(h.row(v), h.row(u), h.cols));
    if (score < best_score) {
      best_score = score;
      best = v;
    }
  }
  if (best == g.n) return random_select(state, rng);  // every candidate isolated
  return best;
}

std::size_t random_select(const ALState& state, Rng& rng) {
  if (state.unlabeled.empty()) throw DataError("random_select: empty unlabeled pool");
  return state.unlabeled[rng.index(state.unlabeled.size())];
}

std::size_t degree_select(const Graph& g, const ALState& state) {
  if (state.unlabeled.empty()) throw DataError("degree_select: empty unlabeled pool");
  std::size_t best = state.unlabeled.front();
  std::size_t best_deg = g.degree(best);
  for (std::size_t v : state.unlabeled) {
    if (g.degree(v) > best_deg) {
      best = v;
      best_deg = g.degree(v);
    }
  }
  return best;
}

std::size_t entropy_select(const ALState& state, const Matrix& probs) {
  if (state.unlabeled.empty()) throw DataError("entropy_select: empty unlabeled pool");
  for (std::size_t v : state.unlabeled) {
    double sum = 0.0;
    for (std::size_t c = 0; c < probs.cols; ++c) sum += probs(v, c);
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("entropy_select: probability row does not sum to 1");
  }
  std::size_t best = state.unlabeled.front();
  double best_ent = -1.0;
  for (std::size_t v : state.unlabeled) {
    double ent = 0.0;
    for (std::size_t c = 0; c < probs.cols; ++c) {
      const double p = probs(v, c);
      if (p > 0.0) ent -= p * std::log(p);
    }
    if (ent > best_ent) {
      best_ent = ent;
      best = v;
    }
  }
  return best;
}

std::vector<std::size_t> featprop_select(const Graph& g, const ALState& state,
                                         std::size_t b_remaining, Rng& rng) {
  const auto& pool = state.unlabeled;
  if (pool.empty()) throw DataError("featprop_select: empty unlabeled pool");
  if (b_remaining < 1 || b_remaining > pool.size())
    throw std::invalid_argument("featprop_select: b_remaining out of range");

  const std::size_t k = b_remaining;
  const std::size_t np = pool.size();
  const std::size_t d = g.features.cols;

  auto dist = [&](std::size_t a, std::size_t b) {
    return std::sqrt(squared_distance(g.features.row(pool[a]), g.features.row(pool[b]), d));
  };

  // initial medoids: k distinct uniform draws from the pool
  std::vector<std::size_t> medoids;  // indices into pool
  {
    std::vector<std::size_t> perm(np);
    for (std::size_t i = 0; i < np; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    medoids.assign(perm.begin(), perm.begin() + k);
    std::sort(medoids.begin(), medoids.end());
  }

  std::vector<std::size_t> assign(np);
  for (int iter = 0; iter < 50; ++iter) {
    // Voronoi assignment; ties to the lower medoid index
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t best_c = 0;
      double best_d = dist(i, medoids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double dd = dist(i, medoids[c]);
        if (dd < best_d) {
          best_d = dd;
          best_c = c;
        }
      }
      assign[i] = best_c;
    }
    // medoid update: member minimizing in-cluster distance sum; ties to
    // the smallest pool index
    bool changed = false;
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t best_m = medoids[c];
      double best_sum = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < np; ++i) {
        if (assign[i] != c) continue;
        double sum = 0.0;
        for (std::size_t j = 0; j < np; ++j)
          if (assign[j] == c) sum += dist(i, j);
        if (sum < best_sum) {
          best_sum = sum;
          best_m = i;
        }
      }
      if (best_m != medoids[c]) {
        medoids[c] = best_m;
        changed = true;
      }
    }
    if (!changed) break;
  }

  std::vector<std::size_t> cluster_size(k, 0);
  for (std::size_t i = 0; i < np; ++i) ++cluster_size[assign[i]];

  std::vector<std::size_t> order(k);
  for (std::size_t c = 0; c < k; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cluster_size[a] != cluster_size[b]) return cluster_size[a] > cluster_size[b];
    return pool[medoids[a]] < pool[medoids[b]];
  });

  std::vector<std::size_t> out;
  for (std::size_t c : order) {
    const std::size_t node = pool[medoids[c]];
    if (state.is_unlabeled(node)) out.push_back(node);
  }
  return out;
}

}  // namespace gal
