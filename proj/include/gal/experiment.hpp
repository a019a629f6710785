#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gal/augment.hpp"
#include "gal/dataset.hpp"
#include "gal/eval.hpp"
#include "gal/graph.hpp"
#include "gal/objective.hpp"

namespace gal {

struct SbmSpec {
  std::vector<std::size_t> blocks;
  double p_in = 0.2;
  double p_out = 0.02;
  std::size_t feat_dim = 16;
  double feat_noise = 0.5;
};

struct ExperimentConfig {
  std::string dataset_path;  // bundle directory; empty -> use sbm
  SbmSpec sbm;
  bool use_sbm = true;

  std::string budget_spec = "20C";  // literal count or "<k>C"
  std::string strategy = "minimax";

  double p_edge = 0.2;
  double p_feat = 0.2;

  ObjectiveConfig objective;

  std::size_t hidden = 128;
  std::size_t dim = 128;
  double lr = 0.001;
  std::size_t warmup_epochs = 50;
  std::size_t epochs_per_round = 10;
  std::size_t max_total_epochs = 100000;
  std::size_t k_hops = 1;
  bool row_normalize_features = false;
  bool featprop_recluster = false;

  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";

  void validate() const;  // throws ConfigError
  std::size_t resolve_budget(int num_classes, std::size_t pool_size) const;
};

// Flat key=value config file; '#' starts a comment line.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct RoundRecord {
  std::uint64_t seed = 0;
  std::size_t round = 0;  // 1-based: |labeled| after the acquisition
  std::string strategy;
  std::size_t selected = 0;
  double score = 0.0;  // strategy score of the selected node
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double selected_homophily = 0.0;
  double graph_homophily = 0.0;
};

struct RunResult {
  std::vector<RoundRecord> rounds;
  std::vector<std::size_t> selected;
  double final_micro = 0.0;
  double final_macro = 0.0;
  HomophilyReport homophily;
};

// One full Algorithm-1 run for a single master seed.
RunResult run_experiment(const ExperimentConfig& cfg, const Graph& g, std::uint64_t seed);

// Loads or generates the configured dataset.
Graph load_experiment_graph(const ExperimentConfig& cfg);

// One CSV line per record, fixed formatting so reruns are byte-identical.
std::string records_csv_header();
std::string record_csv_row(const RoundRecord& r);
void write_records_csv(const std::vector<RoundRecord>& records, const std::string& path);

}  // namespace gal
