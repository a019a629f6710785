#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gal/graph.hpp"
#include "gal/matrix.hpp"
#include "gal/objective.hpp"
#include "gal/rng.hpp"

namespace gal {

// Labeled/unlabeled bookkeeping for the acquisition loop. The pool never
// contains validation or test nodes.
struct ALState {
  std::vector<std::pair<std::size_t, int>> labeled;  // acquisition order
  std::vector<std::size_t> unlabeled;                // sorted
  std::size_t budget = 0;
  std::size_t round = 0;
  PositiveSets positives;

  static ALState init(std::size_t n, const std::vector<std::size_t>& pool, std::size_t budget);

  bool is_unlabeled(std::size_t v) const;
  // Moves v from unlabeled to labeled with its queried label and updates P.
  void acquire(std::size_t v, int label);
};

// Eq-style minimax rule: among unlabeled nodes, the one minimizing the
// maximum squared Euclidean embedding distance to its k-hop neighbors.
// Ties break to the smallest id; isolated candidates are skipped, with a
// uniform random fallback when every candidate is isolated.
std::size_t minimax_select(const Graph& g, const Matrix& h, const ALState& state,
                           std::size_t k, Rng& rng);

std::size_t random_select(const ALState& state, Rng& rng);

std::size_t degree_select(const Graph& g, const ALState& state);

// Maximum predictive entropy over the unlabeled pool; probs rows must sum
// to 1 within 1e-6.
std::size_t entropy_select(const ALState& state, const Matrix& probs);

// K-medoids over raw features of the pool with k = b_remaining; returns
// unlabeled medoids ordered by cluster size descending.
std::vector<std::size_t> featprop_select(const Graph& g, const ALState& state,
                                         std::size_t b_remaining, Rng& rng);

}  // namespace gal
