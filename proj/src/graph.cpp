#include "gal/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "gal/errors.hpp"

namespace gal {

bool Graph::has_edge(std::size_t u, std::size_t v) const {
  auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[u]);
  auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[u + 1]);
  return std::binary_search(first, last, v);
}

Graph build_graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                  Matrix features, std::vector<int> labels, int num_classes) {
  if (features.rows != n)
    throw DataError("feature row count does not match node count");
  if (!labels.empty() && labels.size() != n)
    throw DataError("label count does not match node count");
  for (int y : labels)
    if (y < 0 || y >= num_classes) throw DataError("label out of range");

  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw DataError("edge endpoint out of range");
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  Graph g;
  g.n = n;
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.num_classes = num_classes;
  g.row_ptr.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) {
    auto& nbrs = adj[u];
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    g.row_ptr[u + 1] = g.row_ptr[u] + nbrs.size();
    g.col.insert(g.col.end(), nbrs.begin(), nbrs.end());
  }
  return g;
}

NormalizedAdjacency normalize_adjacency(std::size_t n, const std::vector<std::size_t>& row_ptr,
                                        const std::vector<std::size_t>& col) {
  NormalizedAdjacency a;
  a.n = n;
  a.row_ptr.assign(n + 1, 0);
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t u = 0; u < n; ++u) {
    const double d = static_cast<double>(row_ptr[u + 1] - row_ptr[u]) + 1.0;  // self-loop
    inv_sqrt_deg[u] = 1.0 / std::sqrt(d);
  }
  a.col.reserve(col.size() + n);
  a.val.reserve(col.size() + n);
  for (std::size_t u = 0; u < n; ++u) {
    bool diag_emitted = false;
    for (std::size_t idx = row_ptr[u]; idx < row_ptr[u + 1]; ++idx) {
      const std::size_t v = col[idx];
      if (!diag_emitted && v > u) {
        a.col.push_back(u);
        a.val.push_back(inv_sqrt_deg[u] * inv_sqrt_deg[u]);
        diag_emitted = true;
      }
      a.col.push_back(v);
      a.val.push_back(inv_sqrt_deg[u] * inv_sqrt_deg[v]);
    }
    if (!diag_emitted) {
      a.col.push_back(u);
      a.val.push_back(inv_sqrt_deg[u] * inv_sqrt_deg[u]);
    }
    a.row_ptr[u + 1] = a.col.size();
  }
  return a;
}

NormalizedAdjacency normalize_adjacency(const Graph& g) {
  return normalize_adjacency(g.n, g.row_ptr, g.col);
}

Matrix spmm(const NormalizedAdjacency& a, const Matrix& x) {
  Matrix y(a.n, x.cols);
  for (std::size_t i = 0; i < a.n; ++i) {
    double* yi = y.row(i);
    for (std::size_t idx = a.row_ptr[i]; idx < a.row_ptr[i + 1]; ++idx) {
      const double w = a.val[idx];
      const double* xr = x.row(a.col[idx]);
      for (std::size_t j = 0; j < x.cols; ++j) yi[j] += w * xr[j];
    }
  }
  return y;
}

std::vector<std::size_t> k_hop_neighbors(const Graph& g, std::size_t v, std::size_t k) {
  if (v >= g.n) throw std::invalid_argument("k_hop_neighbors: node id out of range");
  if (k < 1) throw std::invalid_argument("k_hop_neighbors: k must be >= 1");
  std::vector<std::size_t> dist(g.n, static_cast<std::size_t>(-1));
  std::deque<std::size_t> queue{v};
  dist[v] = 0;
  std::vector<std::size_t> out;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (dist[u] == k) continue;
    for (std::size_t idx = g.row_ptr[u]; idx < g.row_ptr[u + 1]; ++idx) {
      const std::size_t w = g.col[idx];
      if (dist[w] != static_cast<std::size_t>(-1)) continue;
      dist[w] = dist[u] + 1;
      out.push_back(w);
      queue.push_back(w);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<double> ego_homophily(const Graph& g, std::size_t v) {
  if (!g.has_labels()) throw DataError("ego_homophily: graph has no labels");
  if (v >= g.n) throw std::invalid_argument("ego_homophily: node id out of range");
  if (g.degree(v) == 0) return std::nullopt;

  // Closed 1-ego network: v plus its direct neighbors.
  std::vector<std::size_t> ego{v};
  for (std::size_t idx = g.row_ptr[v]; idx < g.row_ptr[v + 1]; ++idx)
    ego.push_back(g.col[idx]);
  std::vector<char> in_ego(g.n, 0);
  for (std::size_t u : ego) in_ego[u] = 1;

  std::size_t total = 0, intra = 0;
  for (std::size_t u : ego) {
    for (std::size_t idx = g.row_ptr[u]; idx < g.row_ptr[u + 1]; ++idx) {
      const std::size_t w = g.col[idx];
      if (w <= u || !in_ego[w]) continue;
      ++total;
      if (g.labels[u] == g.labels[w]) ++intra;
    }
  }
  return static_cast<double>(intra) / static_cast<double>(total);
}

double mean_graph_homophily(const Graph& g) {
  if (!g.has_labels()) throw DataError("mean_graph_homophily: graph has no labels");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t v = 0; v < g.n; ++v) {
    if (auto h = ego_homophily(g, v)) {
      sum += *h;
      ++count;
    }
  }
  if (count == 0) throw DataError("mean_graph_homophily: graph has no edges");
  return sum / static_cast<double>(count);
}

}  // namespace gal
