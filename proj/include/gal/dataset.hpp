#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gal/graph.hpp"

namespace gal {

// Validation/test/pool partition of the node set.
struct Split {
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  std::vector<std::size_t> pool;
  std::uint64_t seed = 0;
  bool proportional_fallback = false;  // set when n is too small for 500/1000
};

// Bundle directory layout: meta.json, edges.tsv, features.csv, labels.txt.
Graph load_bundle(const std::string& dir);
void write_bundle(const Graph& g, const std::string& dir, const std::string& name);

// Stochastic block model: Bernoulli(p_in) edges within blocks, Bernoulli(p_out)
// across; features are the block's one-hot centroid plus N(0, feat_noise^2)
// noise; labels are block ids.
Graph generate_sbm(const std::vector<std::size_t>& blocks, double p_in, double p_out,
                   std::size_t feat_dim, double feat_noise, std::uint64_t seed);

// 500 validation / 1000 test nodes when n > 1500, else 10% / 20%.
Split make_split(const Graph& g, std::uint64_t seed);

}  // namespace gal
