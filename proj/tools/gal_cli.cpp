#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gal/dataset.hpp"
#include "gal/errors.hpp"
#include "gal/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct FinalRow {
  std::string strategy;
  std::uint64_t seed = 0;
  double micro = 0.0, macro = 0.0;
  double selected_hom = 0.0, graph_hom = 0.0;
};

std::vector<FinalRow> collect_finals(const std::string& dir) {
  std::vector<FinalRow> out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("records_", 0) == 0 && e.path().extension() == ".csv")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::ifstream f(p);
    std::string line, last;
    std::getline(f, line);  // header
    while (std::getline(f, line))
      if (!line.empty()) last = line;
    if (last.empty()) continue;
    std::stringstream ss(last);
    std::string tok;
    FinalRow r;
    std::getline(ss, tok, ',');
    r.seed = std::stoull(tok);
    std::getline(ss, tok, ',');  // round
    std::getline(ss, r.strategy, ',');
    std::getline(ss, tok, ',');  // selected
    std::getline(ss, tok, ',');  // score
    std::getline(ss, tok, ',');
    r.micro = std::stod(tok);
    std::getline(ss, tok, ',');
    r.macro = std::stod(tok);
    std::getline(ss, tok, ',');
    r.selected_hom = std::stod(tok);
    std::getline(ss, tok, ',');
    r.graph_hom = std::stod(tok);
    out.push_back(r);
  }
  return out;
}

struct Aggregate {
  std::size_t count = 0;
  double mean_micro = 0.0, std_micro = 0.0;
  double mean_macro = 0.0, std_macro = 0.0;
  double selected_hom = 0.0, graph_hom = 0.0, improv_pct = 0.0;
};

std::map<std::string, Aggregate> aggregate(const std::vector<FinalRow>& rows) {
  std::map<std::string, std::vector<FinalRow>> by_strategy;
  for (const auto& r : rows) by_strategy[r.strategy].push_back(r);
  std::map<std::string, Aggregate> out;
  for (const auto& [strategy, group] : by_strategy) {
    Aggregate a;
    a.count = group.size();
    for (const auto& r : group) {
      a.mean_micro += r.micro;
      a.mean_macro += r.macro;
      a.selected_hom += r.selected_hom;
      a.graph_hom += r.graph_hom;
    }
    const double n = static_cast<double>(group.size());
    a.mean_micro /= n;
    a.mean_macro /= n;
    a.selected_hom /= n;
    a.graph_hom /= n;
    for (const auto& r : group) {
      a.std_micro += (r.micro - a.mean_micro) * (r.micro - a.mean_micro);
      a.std_macro += (r.macro - a.mean_macro) * (r.macro - a.mean_macro);
    }
    a.std_micro = std::sqrt(a.std_micro / n);  // population std
    a.std_macro = std::sqrt(a.std_macro / n);
    a.improv_pct =
        a.graph_hom > 0.0 ? 100.0 * (a.selected_hom - a.graph_hom) / a.graph_hom : 0.0;
    out[strategy] = a;
  }
  return out;
}

void run_seeds(const gal::ExperimentConfig& cfg) {
  cfg.validate();
  const gal::Graph g = gal::load_experiment_graph(cfg);
  fs::create_directories(cfg.out_dir);
  for (std::uint64_t seed : cfg.seeds) {
    const gal::RunResult res = gal::run_experiment(cfg, g, seed);
    const std::string path =
        cfg.out_dir + "/records_" + cfg.strategy + "_seed" + std::to_string(seed) + ".csv";
    gal::write_records_csv(res.rounds, path);
    std::printf("seed %llu: micro-F1 %.4f macro-F1 %.4f homophily %.3f -> %.3f\n",
                static_cast<unsigned long long>(seed), res.final_micro, res.final_macro,
                res.homophily.graph_mean, res.homophily.selected_mean);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph active learning laboratory"};
  app.require_subcommand(1);

  std::string config_path, strategy_override, budget_override, out_override;
  std::int64_t seed_override = -1;

  auto* run = app.add_subcommand("run", "Run the train-select-label loop");
  run->add_option("--config", config_path, "flat key=value config file");
  run->add_option("--strategy", strategy_override, "selection strategy override");
  run->add_option("--budget", budget_override, "budget override (count or e.g. 20C)");
  run->add_option("--seed", seed_override, "single-seed override");
  run->add_option("--out", out_override, "output directory override");

  std::string blocks_csv = "50,50";
  double p_in = 0.2, p_out = 0.02, feat_noise = 0.5;
  std::size_t feat_dim = 16;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "sbm_bundle";
  auto* gen = app.add_subcommand("gen-sbm", "Generate an SBM dataset bundle");
  gen->add_option("--blocks", blocks_csv, "comma-separated block sizes");
  gen->add_option("--p-in", p_in, "within-block edge probability");
  gen->add_option("--p-out", p_out, "cross-block edge probability");
  gen->add_option("--feat-dim", feat_dim, "feature dimension");
  gen->add_option("--feat-noise", feat_noise, "feature noise scale");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "bundle directory")->required();

  std::string sweep_param = "lambda", sweep_values = "0.2,0.5,0.8,1.0";
  auto* sweep = app.add_subcommand("sweep", "Grid over lambda or k");
  sweep->add_option("--config", config_path, "flat key=value config file");
  sweep->add_option("--param", sweep_param, "lambda or k");
  sweep->add_option("--values", sweep_values, "comma-separated grid values");
  sweep->add_option("--out", out_override, "output directory override");

  std::string report_in, report_format = "csv";
  auto* report = app.add_subcommand("report", "Aggregate run records");
  report->add_option("--in", report_in, "directory with records_*.csv")->required();
  report->add_option("--format", report_format, "csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      gal::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = gal::parse_config_file(config_path);
      if (!strategy_override.empty()) cfg.strategy = strategy_override;
      if (!budget_override.empty()) cfg.budget_spec = budget_override;
      if (seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
      if (!out_override.empty()) cfg.out_dir = out_override;
      run_seeds(cfg);
    } else if (gen->parsed()) {
      std::vector<std::size_t> blocks;
      std::stringstream ss(blocks_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) blocks.push_back(std::stoull(tok));
      const gal::Graph g =
          gal::generate_sbm(blocks, p_in, p_out, feat_dim, feat_noise, gen_seed);
      gal::write_bundle(g, gen_out, "sbm");
      std::printf("wrote bundle: %s (n=%zu, edges=%zu)\n", gen_out.c_str(), g.n,
                  g.num_undirected_edges());
    } else if (sweep->parsed()) {
      gal::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = gal::parse_config_file(config_path);
      if (!out_override.empty()) cfg.out_dir = out_override;
      if (sweep_param != "lambda" && sweep_param != "k")
        throw gal::ConfigError("sweep --param must be lambda or k");
      const std::string base_out = cfg.out_dir;
      std::stringstream ss(sweep_values);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        gal::ExperimentConfig c = cfg;
        if (sweep_param == "lambda")
          c.objective.lambda = std::stod(tok);
        else
          c.k_hops = std::stoull(tok);
        c.out_dir = base_out + "/" + sweep_param + "_" + tok;
        std::printf("== %s = %s ==\n", sweep_param.c_str(), tok.c_str());
        run_seeds(c);
      }
    } else if (report->parsed()) {
      const auto rows = collect_finals(report_in);
      if (rows.empty()) throw gal::DataError("no records found in " + report_in);
      const auto agg = aggregate(rows);
      if (report_format == "json") {
        nlohmann::json j;
        for (const auto& [strategy, a] : agg) {
          j[strategy] = {{"seeds", a.count},
                         {"micro_f1", {{"mean", a.mean_micro}, {"std", a.std_micro}}},
                         {"macro_f1", {{"mean", a.mean_macro}, {"std", a.std_macro}}},
                         {"homophily",
                          {{"original", a.graph_hom},
                           {"selected", a.selected_hom},
                           {"improvement_pct", a.improv_pct}}}};
        }
        std::cout << j.dump(2) << "\n";
      } else if (report_format == "csv") {
        std::printf(
            "strategy,seeds,mean_micro_f1,std_micro_f1,mean_macro_f1,std_macro_f1,"
            "homophily_original,homophily_selected,homophily_improvement_pct\n");
        for (const auto& [strategy, a] : agg)
          std::printf("%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", strategy.c_str(), a.count,
                      a.mean_micro, a.std_micro, a.mean_macro, a.std_macro, a.graph_hom,
                      a.selected_hom, a.improv_pct);
      } else {
        throw gal::ConfigError("report --format must be csv or json");
      }
    }
  } catch (const gal::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const gal::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const gal::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
