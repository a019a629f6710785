#include "gal/augment.hpp"

#include <stdexcept>

#include "gal/rng.hpp"

namespace gal {

void drop_edges(const Graph& g, double p_edge, std::uint64_t seed,
                std::vector<std::size_t>& row_ptr, std::vector<std::size_t>& col) {
  if (p_edge < 0.0 || p_edge > 1.0)
    throw std::invalid_argument("drop_edges: p_edge must be in [0,1]");
  Rng rng(seed);
  // One draw per undirected edge (u < v); both directions share fate.
  std::vector<char> keep;
  keep.reserve(g.num_undirected_edges());
  std::vector<std::size_t> edge_id(g.col.size());
  {
    std::size_t next = 0;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pending(g.n);
    for (std::size_t u = 0; u < g.n; ++u) {
      for (std::size_t idx = g.row_ptr[u]; idx < g.row_ptr[u + 1]; ++idx) {
        const std::size_t v = g.col[idx];
        if (u < v) {
          keep.push_back(rng.bernoulli(1.0 - p_edge) ? 1 : 0);
          edge_id[idx] = next;
          pending[v].emplace_back(u, next);
          ++next;
        }
      }
    }
    for (std::size_t v = 0; v < g.n; ++v) {
      // mirror ids onto the (v, u) arcs with u < v
      std::size_t cursor = 0;
      for (std::size_t idx = g.row_ptr[v]; idx < g.row_ptr[v + 1]; ++idx) {
        if (g.col[idx] < v) edge_id[idx] = pending[v][cursor++].second;
      }
    }
  }
  row_ptr.assign(g.n + 1, 0);
  col.clear();
  for (std::size_t u = 0; u < g.n; ++u) {
    for (std::size_t idx = g.row_ptr[u]; idx < g.row_ptr[u + 1]; ++idx)
      if (keep[edge_id[idx]]) col.push_back(g.col[idx]);
    row_ptr[u + 1] = col.size();
  }
}

void mask_features(const Matrix& x, double p_feat, std::uint64_t seed, Matrix& out,
                   std::vector<std::uint8_t>& mask) {
  if (p_feat < 0.0 || p_feat > 1.0)
    throw std::invalid_argument("mask_features: p_feat must be in [0,1]");
  Rng rng(seed);
  mask.assign(x.cols, 0);
  for (std::size_t j = 0; j < x.cols; ++j) mask[j] = rng.bernoulli(1.0 - p_feat) ? 1 : 0;
  out = Matrix(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j)
      if (mask[j]) out(i, j) = x(i, j);
}

GraphView make_view(const Graph& g, const AugmentConfig& cfg) {
  GraphView v;
  v.n = g.n;
  v.seed = cfg.seed;
  drop_edges(g, cfg.p_edge, derive_seed(cfg.seed, streams::kAugment, 0), v.row_ptr, v.col);
  mask_features(g.features, cfg.p_feat, derive_seed(cfg.seed, streams::kAugment, 1), v.features,
                v.mask);
  return v;
}

}  // namespace gal
