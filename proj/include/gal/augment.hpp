#pragma once

#include <cstdint>
#include <vector>

#include "gal/graph.hpp"

namespace gal {

struct AugmentConfig {
  double p_edge = 0.2;  // probability of an edge being removed
  double p_feat = 0.2;  // probability of a feature dimension being masked
  std::uint64_t seed = 0;
};

// Stochastically augmented copy of a graph: an edge subset plus
// column-masked features. Node set never changes.
struct GraphView {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  Matrix features;
  std::vector<std::uint8_t> mask;  // per-dimension, 1 = kept
  std::uint64_t seed = 0;
};

// Keeps each undirected edge with probability 1 - p_edge; both directions
// share one Bernoulli draw. Returns the surviving CSR structure.
void drop_edges(const Graph& g, double p_edge, std::uint64_t seed,
                std::vector<std::size_t>& row_ptr, std::vector<std::size_t>& col);

// One mask vector drawn once and applied to every row.
void mask_features(const Matrix& x, double p_feat, std::uint64_t seed, Matrix& out,
                   std::vector<std::uint8_t>& mask);

GraphView make_view(const Graph& g, const AugmentConfig& cfg);

}  // namespace gal
