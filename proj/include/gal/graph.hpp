#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gal/matrix.hpp"

namespace gal {

// Undirected graph in CSR form. Both directions of every edge are stored;
// no self-loops; column indices strictly increasing within each row.
struct Graph {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;  // size n+1
  std::vector<std::size_t> col;      // size 2 * undirected edge count
  Matrix features;                   // n x m
  std::vector<int> labels;           // empty when absent, else size n
  int num_classes = 0;

  bool has_labels() const { return !labels.empty(); }
  std::size_t degree(std::size_t v) const { return row_ptr[v + 1] - row_ptr[v]; }
  std::size_t num_undirected_edges() const { return col.size() / 2; }

  bool has_edge(std::size_t u, std::size_t v) const;
};

// Symmetrically normalized adjacency with self-loops, D^{-1/2}(A+I)D^{-1/2}.
struct NormalizedAdjacency {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  std::vector<double> val;
};

// Builds a Graph from a directed edge list: symmetrizes, deduplicates,
// drops self-loops. Endpoints must be < n.
Graph build_graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                  Matrix features, std::vector<int> labels = {}, int num_classes = 0);

NormalizedAdjacency normalize_adjacency(const Graph& g);

// Same normalization over an explicit CSR edge subset (for augmented views).
NormalizedAdjacency normalize_adjacency(std::size_t n, const std::vector<std::size_t>& row_ptr,
                                        const std::vector<std::size_t>& col);

// Y = A_norm * X, fixed reduction order.
Matrix spmm(const NormalizedAdjacency& a, const Matrix& x);

// Nodes at shortest-path distance in [1, k] from v; excludes v.
std::vector<std::size_t> k_hop_neighbors(const Graph& g, std::size_t v, std::size_t k);

// Fraction of intra-class edges in the closed 1-ego network of v.
// nullopt when v is isolated. Throws when labels are missing.
std::optional<double> ego_homophily(const Graph& g, std::size_t v);

// Mean ego_homophily over all non-isolated nodes.
double mean_graph_homophily(const Graph& g);

}  // namespace gal
