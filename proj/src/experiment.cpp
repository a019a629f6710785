#include "gal/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gal/errors.hpp"
#include "gal/model.hpp"
#include "gal/rng.hpp"
#include "gal/selection.hpp"

namespace gal {

namespace {

const std::vector<std::string> kStrategies{"minimax", "random", "degree", "entropy", "featprop"};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (std::find(kStrategies.begin(), kStrategies.end(), strategy) == kStrategies.end())
    throw ConfigError("unknown strategy: " + strategy);
  if (p_edge < 0.0 || p_edge > 1.0) throw ConfigError("p_edge must be in [0,1]");
  if (p_feat < 0.0 || p_feat > 1.0) throw ConfigError("p_feat must be in [0,1]");
  if (objective.tau <= 0.0) throw ConfigError("tau must be positive");
  if (objective.lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  if (lr <= 0.0) throw ConfigError("lr must be positive");
  if (hidden == 0 || dim == 0) throw ConfigError("model dimensions must be positive");
  if (k_hops < 1) throw ConfigError("k_hops must be >= 1");
  if (seeds.empty()) throw ConfigError("at least one seed required");
  if (use_sbm) {
    if (sbm.blocks.size() < 2) throw ConfigError("sbm needs at least 2 blocks");
    if (!(sbm.p_out >= 0.0 && sbm.p_out <= sbm.p_in && sbm.p_in <= 1.0))
      throw ConfigError("sbm needs 0 <= p_out <= p_in <= 1");
  }
  // budget spec syntax
  std::string b = budget_spec;
  if (!b.empty() && (b.back() == 'C' || b.back() == 'c')) b.pop_back();
  if (b.empty()) throw ConfigError("empty budget");
  for (char ch : b)
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw ConfigError("bad budget spec: " + budget_spec);
}

std::size_t ExperimentConfig::resolve_budget(int num_classes, std::size_t pool_size) const {
  std::string b = budget_spec;
  bool per_class = false;
  if (!b.empty() && (b.back() == 'C' || b.back() == 'c')) {
    per_class = true;
    b.pop_back();
  }
  std::size_t count = std::stoull(b);
  if (per_class) count *= static_cast<std::size_t>(num_classes);
  if (count == 0 || count > pool_size)
    throw ConfigError("budget " + std::to_string(count) + " exceeds pool size " +
                      std::to_string(pool_size));
  return count;
}

void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "dataset") {
      cfg.dataset_path = value;
      cfg.use_sbm = false;
    } else if (key == "sbm_blocks") {
      cfg.sbm.blocks.clear();
      for (const auto& tok : split_commas(value)) cfg.sbm.blocks.push_back(std::stoull(tok));
      cfg.use_sbm = true;
    } else if (key == "sbm_p_in") {
      cfg.sbm.p_in = std::stod(value);
    } else if (key == "sbm_p_out") {
      cfg.sbm.p_out = std::stod(value);
    } else if (key == "sbm_feat_dim") {
      cfg.sbm.feat_dim = std::stoull(value);
    } else if (key == "sbm_feat_noise") {
      cfg.sbm.feat_noise = std::stod(value);
    } else if (key == "budget") {
      cfg.budget_spec = value;
    } else if (key == "strategy") {
      cfg.strategy = value;
    } else if (key == "p_edge") {
      cfg.p_edge = std::stod(value);
    } else if (key == "p_feat") {
      cfg.p_feat = std::stod(value);
    } else if (key == "tau") {
      cfg.objective.tau = std::stod(value);
    } else if (key == "lambda") {
      cfg.objective.lambda = std::stod(value);
    } else if (key == "exclude_positives_from_negatives") {
      cfg.objective.exclude_positives_from_negatives = (value == "true" || value == "1");
    } else if (key == "positives_from_both_views") {
      cfg.objective.positives_from_both_views = (value == "true" || value == "1");
    } else if (key == "hidden") {
      cfg.hidden = std::stoull(value);
    } else if (key == "dim") {
      cfg.dim = std::stoull(value);
    } else if (key == "lr") {
      cfg.lr = std::stod(value);
    } else if (key == "warmup_epochs") {
      cfg.warmup_epochs = std::stoull(value);
    } else if (key == "epochs_per_round") {
      cfg.epochs_per_round = std::stoull(value);
    } else if (key == "max_total_epochs") {
      cfg.max_total_epochs = std::stoull(value);
    } else if (key == "k_hops") {
      cfg.k_hops = std::stoull(value);
    } else if (key == "row_normalize_features") {
      cfg.row_normalize_features = (value == "true" || value == "1");
    } else if (key == "featprop_recluster") {
      cfg.featprop_recluster = (value == "true" || value == "1");
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& tok : split_commas(value)) cfg.seeds.push_back(std::stoull(tok));
    } else if (key == "out") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad value for config key '" + key + "': " + value);
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    apply_config_line(cfg, key, value);
  }
  return cfg;
}

Graph load_experiment_graph(const ExperimentConfig& cfg) {
  Graph g = cfg.use_sbm ? generate_sbm(cfg.sbm.blocks, cfg.sbm.p_in, cfg.sbm.p_out,
                                       cfg.sbm.feat_dim, cfg.sbm.feat_noise,
                                       /*seed=*/cfg.seeds.front())
                        : load_bundle(cfg.dataset_path);
  if (cfg.row_normalize_features) {
    for (std::size_t i = 0; i < g.n; ++i) {
      double nrm = 0.0;
      for (std::size_t j = 0; j < g.features.cols; ++j)
        nrm += g.features(i, j) * g.features(i, j);
      nrm = std::sqrt(nrm);
      if (nrm > 0.0)
        for (std::size_t j = 0; j < g.features.cols; ++j) g.features(i, j) /= nrm;
    }
  }
  return g;
}

namespace {

struct Trainer {
  const Graph& g;
  const ExperimentConfig& cfg;
  std::uint64_t seed;
  ModelParams params;
  AdamState adam;
  std::size_t total_epochs = 0;
  std::uint64_t view_counter = 0;

  Trainer(const Graph& graph, const ExperimentConfig& c, std::uint64_t s)
      : g(graph),
        cfg(c),
        params(ModelParams::init(graph.features.cols, c.hidden, c.dim, s)),
        adam(AdamState::init(params, c.lr)) {
    seed = s;
  }

  GraphView draw_view() {
    AugmentConfig ac{cfg.p_edge, cfg.p_feat, derive_seed(seed, streams::kAugment, view_counter++)};
    return make_view(g, ac);
  }

  // One optimization step on a fixed pair of views.
  void epoch(const GraphView& v1, const NormalizedAdjacency& a1, const GraphView& v2,
             const NormalizedAdjacency& a2, const PositiveSets& p) {
    GcnCache c1 = gcn_forward_cached(a1, v1.features, params);
    GcnCache c2 = gcn_forward_cached(a2, v2.features, params);
    Matrix du, dv;
    total_objective_grad(c1.u, c2.u, p, cfg.objective, du, dv);
    ModelGrads grads = ModelGrads::zeros_like(params);
    gcn_backward(a1, c1, du, params, grads);
    gcn_backward(a2, c2, dv, params, grads);
    grads.check_finite();
    adam_step(params, grads, adam);
    ++total_epochs;
  }

  // Draws fresh views for each of `count` epochs.
  void train_fresh(std::size_t count, const PositiveSets& p) {
    for (std::size_t e = 0; e < count && total_epochs < cfg.max_total_epochs; ++e) {
      GraphView v1 = draw_view();
      GraphView v2 = draw_view();
      const auto a1 = normalize_adjacency(v1.n, v1.row_ptr, v1.col);
      const auto a2 = normalize_adjacency(v2.n, v2.row_ptr, v2.col);
      epoch(v1, a1, v2, a2, p);
    }
  }

  // One view pair for the whole round.
  void train_round(std::size_t count, const PositiveSets& p) {
    if (count == 0 || total_epochs >= cfg.max_total_epochs) return;
    GraphView v1 = draw_view();
    GraphView v2 = draw_view();
    const auto a1 = normalize_adjacency(v1.n, v1.row_ptr, v1.col);
    const auto a2 = normalize_adjacency(v2.n, v2.row_ptr, v2.col);
    for (std::size_t e = 0; e < count && total_epochs < cfg.max_total_epochs; ++e)
      epoch(v1, a1, v2, a2, p);
  }
};

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const Graph& g, std::uint64_t seed) {
  cfg.validate();
  if (!g.has_labels()) throw DataError("run_experiment: dataset has no labels");

  const Split split = make_split(g, seed);
  const std::size_t budget = cfg.resolve_budget(g.num_classes, split.pool.size());
  const NormalizedAdjacency full_adj = normalize_adjacency(g);

  ALState state = ALState::init(g.n, split.pool, budget);
  Trainer trainer(g, cfg, seed);
  Rng select_rng(derive_seed(seed, streams::kSelect));

  std::vector<int> test_truth;
  test_truth.reserve(split.test.size());
  for (std::size_t v : split.test) test_truth.push_back(g.labels[v]);

  trainer.train_fresh(cfg.warmup_epochs, state.positives);

  std::vector<std::size_t> featprop_queue;
  bool featprop_ready = false;

  RunResult result;
  while (state.labeled.size() < budget) {
    trainer.train_round(cfg.epochs_per_round, state.positives);

    // embeddings on the unaugmented graph with current parameters
    const Matrix h = gcn_forward(full_adj, g.features, trainer.params);

    std::size_t pick = 0;
    double score = 0.0;
    if (cfg.strategy == "minimax") {
      pick = minimax_select(g, h, state, cfg.k_hops, select_rng);
      const auto nbrs = k_hop_neighbors(g, pick, cfg.k_hops);
      for (std::size_t u : nbrs) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < h.cols; ++j) {
          const double diff = h(pick, j) - h(u, j);
          d2 += diff * diff;
        }
        score = std::max(score, d2);
      }
    } else if (cfg.strategy == "random") {
      pick = random_select(state, select_rng);
    } else if (cfg.strategy == "degree") {
      pick = degree_select(g, state);
      score = static_cast<double>(g.degree(pick));
    } else if (cfg.strategy == "entropy") {
      if (state.labeled.empty()) {
        pick = random_select(state, select_rng);
      } else {
        const ProbeModel probe = train_probe(h, state.labeled, g.num_classes);
        const Matrix probs = predict_proba(probe, h);
        pick = entropy_select(state, probs);
        for (std::size_t c = 0; c < probs.cols; ++c) {
          const double p = probs(pick, c);
          if (p > 0.0) score -= p * std::log(p);
        }
      }
    } else {  // featprop
      if (cfg.featprop_recluster || !featprop_ready) {
        const std::size_t remaining =
            cfg.featprop_recluster ? budget - state.labeled.size() : budget;
        featprop_queue = featprop_select(g, state, remaining, select_rng);
        featprop_ready = true;
      }
      while (!featprop_queue.empty() && !state.is_unlabeled(featprop_queue.front()))
        featprop_queue.erase(featprop_queue.begin());
      if (featprop_queue.empty()) {
        pick = random_select(state, select_rng);  // exhausted medoid list
      } else {
        pick = featprop_queue.front();
        featprop_queue.erase(featprop_queue.begin());
      }
    }

    state.acquire(pick, g.labels[pick]);
    result.selected.push_back(pick);

    RoundRecord rec;
    rec.seed = seed;
    rec.round = state.labeled.size();
    rec.strategy = cfg.strategy;
    rec.selected = pick;
    rec.score = score;
    {
      const ProbeModel probe = train_probe(h, state.labeled, g.num_classes);
      std::vector<int> pred;
      {
        Matrix ht(split.test.size(), h.cols);
        for (std::size_t i = 0; i < split.test.size(); ++i)
          std::copy(h.row(split.test[i]), h.row(split.test[i]) + h.cols, ht.row(i));
        pred = predict_labels(probe, ht);
      }
      const auto [micro, macro] = f1_scores(pred, test_truth, g.num_classes);
      rec.micro_f1 = micro;
      rec.macro_f1 = macro;
    }
    {
      const HomophilyReport hr = homophily_report(g, result.selected);
      rec.selected_homophily = hr.selected_mean;
      rec.graph_homophily = hr.graph_mean;
    }
    result.rounds.push_back(rec);
  }

  result.final_micro = result.rounds.back().micro_f1;
  result.final_macro = result.rounds.back().macro_f1;
  result.homophily = homophily_report(g, result.selected);
  return result;
}

std::string records_csv_header() {
  return "seed,round,strategy,selected,score,micro_f1,macro_f1,selected_homophily,graph_homophily";
}

std::string record_csv_row(const RoundRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%llu,%zu,%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g",
                static_cast<unsigned long long>(r.seed), r.round, r.strategy.c_str(), r.selected,
                r.score, r.micro_f1, r.macro_f1, r.selected_homophily, r.graph_homophily);
  return std::string(buf);
}

void write_records_csv(const std::vector<RoundRecord>& records, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open output file: " + path);
  f << records_csv_header() << "\n";
  for (const auto& r : records) f << record_csv_row(r) << "\n";
}

}  // namespace gal
