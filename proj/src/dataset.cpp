#include "gal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gal/errors.hpp"
#include "gal/rng.hpp"

namespace fs = std::filesystem;

namespace gal {

namespace {

std::ifstream open_or_throw(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw DataError("missing file: " + p.string());
  return f;
}

}  // namespace

Graph load_bundle(const std::string& dir) {
  const fs::path root(dir);
  nlohmann::json meta;
  {
    auto f = open_or_throw(root / "meta.json");
    try {
      f >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed meta.json: " + std::string(e.what()));
    }
  }
  const std::size_t n = meta.at("n").get<std::size_t>();
  const std::size_t m = meta.at("m").get<std::size_t>();
  const int num_classes = meta.at("C").get<int>();

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  {
    auto f = open_or_throw(root / "edges.tsv");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::size_t u, v;
      if (!(ss >> u >> v))
        throw DataError("edges.tsv line " + std::to_string(lineno) + ": malformed row");
      if (u >= n || v >= n)
        throw DataError("edges.tsv line " + std::to_string(lineno) + ": endpoint out of range");
      edges.emplace_back(u, v);
    }
  }

  Matrix x(n, m);
  {
    auto f = open_or_throw(root / "features.csv");
    std::string line;
    std::size_t row = 0;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      if (row >= n) throw DataError("features.csv: more rows than declared node count");
      std::istringstream ss(line);
      std::string cell;
      std::size_t j = 0;
      while (std::getline(ss, cell, ',')) {
        if (j >= m) throw DataError("features.csv row " + std::to_string(row) + ": too many columns");
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) throw DataError("features.csv row " + std::to_string(row) + ": bad number");
        if (!std::isfinite(v))
          throw DataError("features.csv row " + std::to_string(row) + ": non-finite feature value");
        x(row, j++) = v;
      }
      if (j != m) throw DataError("features.csv row " + std::to_string(row) + ": column count mismatch");
      ++row;
    }
    if (row != n) throw DataError("features.csv: row count mismatch (declared n=" + std::to_string(n) + ")");
  }

  std::vector<int> labels;
  {
    auto f = open_or_throw(root / "labels.txt");
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      int y;
      try {
        y = std::stoi(line);
      } catch (...) {
        throw DataError("labels.txt: malformed label '" + line + "'");
      }
      if (y < 0 || y >= num_classes)
        throw DataError("labels.txt: label " + std::to_string(y) + " out of range [0, " +
                        std::to_string(num_classes) + ")");
      labels.push_back(y);
    }
    if (labels.size() != n) throw DataError("labels.txt: count mismatch");
  }

  return build_graph(n, edges, std::move(x), std::move(labels), num_classes);
}

void write_bundle(const Graph& g, const std::string& dir, const std::string& name) {
  const fs::path root(dir);
  fs::create_directories(root);
  {
    nlohmann::json meta{{"name", name},
                        {"n", g.n},
                        {"m", g.features.cols},
                        {"C", g.num_classes},
                        {"directed", false}};
    std::ofstream f(root / "meta.json");
    f << meta.dump(2) << "\n";
  }
  {
    std::ofstream f(root / "edges.tsv");
    for (std::size_t u = 0; u < g.n; ++u)
      for (std::size_t idx = g.row_ptr[u]; idx < g.row_ptr[u + 1]; ++idx)
        if (g.col[idx] > u) f << u << "\t" << g.col[idx] << "\n";
  }
  {
    std::ofstream f(root / "features.csv");
    f.precision(17);
    for (std::size_t i = 0; i < g.n; ++i) {
      for (std::size_t j = 0; j < g.features.cols; ++j) {
        if (j) f << ",";
        f << g.features(i, j);
      }
      f << "\n";
    }
  }
  {
    std::ofstream f(root / "labels.txt");
    for (int y : g.labels) f << y << "\n";
  }
}

Graph generate_sbm(const std::vector<std::size_t>& blocks, double p_in, double p_out,
                   std::size_t feat_dim, double feat_noise, std::uint64_t seed) {
  if (blocks.size() < 2) throw std::invalid_argument("generate_sbm: need at least 2 blocks");
  if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0))
    throw std::invalid_argument("generate_sbm: need 0 <= p_out <= p_in <= 1");
  if (feat_dim == 0) throw std::invalid_argument("generate_sbm: feat_dim must be positive");

  const std::size_t n = std::accumulate(blocks.begin(), blocks.end(), std::size_t{0});
  std::vector<int> block_of(n);
  {
    std::size_t node = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      for (std::size_t i = 0; i < blocks[b]; ++i) block_of[node++] = static_cast<int>(b);
  }

  Rng edge_rng(derive_seed(seed, streams::kSbm, 0));
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double p = (block_of[u] == block_of[v]) ? p_in : p_out;
      if (p > 0.0 && edge_rng.bernoulli(p)) edges.emplace_back(u, v);
    }
  }

  Rng feat_rng(derive_seed(seed, streams::kSbm, 1));
  Matrix x(n, feat_dim);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, static_cast<std::size_t>(block_of[i]) % feat_dim) = 1.0;
    for (std::size_t j = 0; j < feat_dim; ++j) x(i, j) += feat_rng.normal(0.0, feat_noise);
  }

  return build_graph(n, edges, std::move(x), std::move(block_of),
                     static_cast<int>(blocks.size()));
}

Split make_split(const Graph& g, std::uint64_t seed) {
  Split s;
  s.seed = seed;
  std::vector<std::size_t> perm(g.n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, streams::kSplit));
  std::shuffle(perm.begin(), perm.end(), rng.engine());

  std::size_t n_val = 500, n_test = 1000;
  if (g.n <= 1500) {
    s.proportional_fallback = true;
    n_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(g.n)));
    n_test = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(g.n)));
  }
  s.val.assign(perm.begin(), perm.begin() + n_val);
  s.test.assign(perm.begin() + n_val, perm.begin() + n_val + n_test);
  s.pool.assign(perm.begin() + n_val + n_test, perm.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.pool.begin(), s.pool.end());
  return s;
}

}  // namespace gal
