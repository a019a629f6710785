// Acceptance suite: one pass/fail line per criterion, exit code 1 when any
// gated criterion fails. Run from anywhere; the optional citation-network
// bundle is looked up via GAL_CORA_BUNDLE or ./data/cora.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "gal/augment.hpp"
#include "gal/dataset.hpp"
#include "gal/eval.hpp"
#include "gal/experiment.hpp"
#include "gal/graph.hpp"
#include "gal/model.hpp"
#include "gal/objective.hpp"
#include "gal/selection.hpp"

using namespace gal;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) ++failures;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// ---- shared instance machinery for the gradient criteria ----------------

struct Instance {
  Graph g;
  GraphView v1, v2;
  NormalizedAdjacency a1, a2;
  ModelParams params;
  PositiveSets positives;
  ObjectiveConfig cfg;
};

Instance make_instance_at(std::uint64_t seed, std::size_t n = 12, std::size_t m = 5,
                          std::size_t h = 4, std::size_t d = 3) {
  Instance in{generate_sbm({n / 2, n - n / 2}, 0.5, 0.2, m, 0.6, seed),
              {}, {}, {}, {}, ModelParams(), PositiveSets(n), {}};
  in.v1 = make_view(in.g, {0.3, 0.3, seed * 2 + 1});
  in.v2 = make_view(in.g, {0.3, 0.3, seed * 2 + 2});
  in.a1 = normalize_adjacency(in.v1.n, in.v1.row_ptr, in.v1.col);
  in.a2 = normalize_adjacency(in.v2.n, in.v2.row_ptr, in.v2.col);
  in.params = ModelParams::init(m, h, d, seed);
  // random biases keep projected rows away from the exact-zero point where
  // the cosine critic is non-differentiable
  Rng bias_rng(seed + 1000);
  for (double& b : in.params.b1) b = bias_rng.normal(0.0, 0.1);
  for (double& b : in.params.b2) b = bias_rng.normal(0.0, 0.1);
  in.positives.add_labeled(0, in.g.labels[0]);
  in.positives.add_labeled(1, in.g.labels[1]);
  in.positives.add_labeled(2, in.g.labels[2]);
  in.positives.add_labeled(3, in.g.labels[3]);
  in.cfg.tau = 0.5;
  in.cfg.lambda = 1.0;
  return in;
}

// Central differences are only meaningful at differentiable, well-conditioned
// points: no relu pre-activation within the step of its kink and no projected
// row with a norm small enough to blow up the normalization curvature.
bool well_posed(const Instance& in) {
  for (int view = 0; view < 2; ++view) {
    const GcnCache c = gcn_forward_cached(view ? in.a2 : in.a1,
                                          view ? in.v2.features : in.v1.features, in.params);
    for (double z : c.z1.data)
      if (std::abs(z) < 5e-3) return false;
    for (std::size_t i = 0; i < c.u.rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < c.u.cols; ++j) s += c.u(i, j) * c.u(i, j);
      if (std::sqrt(s) < 0.15) return false;
    }
  }
  return true;
}

Instance make_instance(std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Instance in = make_instance_at(seed + attempt * 100000);
    if (well_posed(in)) return in;
  }
}

double loss_of(const Instance& in, const ModelParams& p) {
  const GcnCache c1 = gcn_forward_cached(in.a1, in.v1.features, p);
  const GcnCache c2 = gcn_forward_cached(in.a2, in.v2.features, p);
  return total_objective(c1.u, c2.u, in.positives, in.cfg);
}

double fd_max_rel_error(const Instance& in, double step = 1e-4) {
  ModelParams p = in.params;
  const GcnCache c1 = gcn_forward_cached(in.a1, in.v1.features, p);
  const GcnCache c2 = gcn_forward_cached(in.a2, in.v2.features, p);
  Matrix du, dv;
  total_objective_grad(c1.u, c2.u, in.positives, in.cfg, du, dv);
  ModelGrads grads = ModelGrads::zeros_like(p);
  gcn_backward(in.a1, c1, du, p, grads);
  gcn_backward(in.a2, c2, dv, p, grads);
  std::vector<std::pair<std::vector<double>*, const std::vector<double>*>> tensors = {
      {&p.w1.data, &grads.w1.data}, {&p.w2.data, &grads.w2.data},
      {&p.g1.data, &grads.g1.data}, {&p.b1, &grads.b1},
      {&p.g2.data, &grads.g2.data}, {&p.b2, &grads.b2}};
  double max_rel = 0.0;
  for (auto& [values, grad] : tensors) {
    for (std::size_t i = 0; i < values->size(); ++i) {
      const double orig = (*values)[i];
      (*values)[i] = orig + step;
      const double up = loss_of(in, p);
      (*values)[i] = orig - step;
      const double down = loss_of(in, p);
      (*values)[i] = orig;
      const double fd = (up - down) / (2.0 * step);
      const double denom = std::max({std::abs(fd), std::abs((*grad)[i]), 1e-6});
      max_rel = std::max(max_rel, std::abs(fd - (*grad)[i]) / denom);
    }
  }
  return max_rel;
}

// ---- brute-force minimax oracle -----------------------------------------

std::size_t brute_force_minimax(const Graph& g, const Matrix& h, const ALState& state,
                                std::size_t k) {
  std::size_t best = g.n;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t v : state.unlabeled) {
    std::vector<std::size_t> dist(g.n, g.n + 10);
    dist[v] = 0;
    for (std::size_t round = 0; round < k; ++round) {
      std::vector<std::size_t> next = dist;
      for (std::size_t u = 0; u < g.n; ++u)
        for (std::size_t i = g.row_ptr[u]; i < g.row_ptr[u + 1]; ++i)
          next[g.col[i]] = std::min(next[g.col[i]], dist[u] + 1);
      dist = next;
    }
    double worst = -1.0;
    for (std::size_t u = 0; u < g.n; ++u) {
      if (u == v || dist[u] > k) continue;
      double d2 = 0.0;
      for (std::size_t j = 0; j < h.cols; ++j) {
        const double diff = h(v, j) - h(u, j);
        d2 += diff * diff;
      }
      worst = std::max(worst, d2);
    }
    if (worst < 0.0) continue;
    if (worst < best_score) {
      best_score = worst;
      best = v;
    }
  }
  return best;
}

// ---- shared experiment configs ------------------------------------------

ExperimentConfig sbm_config() {
  ExperimentConfig cfg;
  cfg.sbm.blocks = {60, 60, 60};
  cfg.sbm.p_in = 0.25;
  cfg.sbm.p_out = 0.02;
  cfg.sbm.feat_dim = 16;
  cfg.sbm.feat_noise = 1.2;
  cfg.hidden = 32;
  cfg.dim = 16;
  cfg.warmup_epochs = 50;
  cfg.epochs_per_round = 10;
  return cfg;
}

// ---- criteria -----------------------------------------------------------

void c1_gradients() {
  const auto t0 = clock_type::now();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed)
    worst = std::max(worst, fd_max_rel_error(make_instance(seed)));
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "max relative error %.3e over 50 instances (tolerance 1e-4), %.1fs", worst,
                elapsed);
  report("C1 gradient correctness", worst < 1e-4 && elapsed < 60.0, buf);
}

void c2_objective_reduction() {
  Rng rng(202);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + rng.index(8), d = 2 + rng.index(4);
    Matrix u(n, d), v(n, d);
    for (double& x : u.data) x = rng.normal();
    for (double& x : v.data) x = rng.normal();
    ObjectiveConfig cfg;
    cfg.tau = rng.uniform(0.2, 1.5);
    const PositiveSets none(n);
    const double base = total_objective(u, v, none, cfg);
    // empty labeled set
    worst = std::max(worst, std::abs(total_objective(u, v, none, cfg) - base));
    // lambda = 0 with a nonempty labeled set
    PositiveSets p(n);
    p.add_labeled(0, 0);
    p.add_labeled(1, 0);
    ObjectiveConfig zero = cfg;
    zero.lambda = 0.0;
    worst = std::max(worst, std::abs(total_objective(u, v, p, zero) - base));
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "max deviation %.3e over 100 instances (tolerance 1e-12)",
                worst);
  report("C2 objective reduction", worst < 1e-12, buf);
}

void c3_minimax_oracle() {
  Rng rng(303);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng.index(47);  // up to 50
    const double p = rng.uniform(0.0, 0.25);  // includes isolated-heavy graphs
    const Graph g = generate_sbm({n / 2, n - n / 2}, p, p, 2, 1.0, trial + 1);
    Matrix h(n, 2);
    for (double& x : h.data) x = rng.normal();
    // duplicate some rows to force ties
    if (n > 2 && trial % 3 == 0)
      for (std::size_t j = 0; j < 2; ++j) h(1, j) = h(0, j);
    ALState s = ALState::init(n, [&] {
      std::vector<std::size_t> pool(n);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      return pool;
    }(), n);
    for (int l = 0; l < 2 && s.unlabeled.size() > 1; ++l)
      s.acquire(s.unlabeled[rng.index(s.unlabeled.size())], 0);
    const std::size_t k = 1 + rng.index(2);
    const std::size_t oracle = brute_force_minimax(g, h, s, k);
    Rng sel_rng(5);
    const std::size_t got = minimax_select(g, h, s, k, sel_rng);
    if (oracle < g.n) {
      if (got != oracle) ++mismatches;
    } else if (!s.is_unlabeled(got)) {
      ++mismatches;  // fallback must stay in the pool
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d mismatches over 200 random graphs", mismatches);
  report("C3 minimax oracle equivalence", mismatches == 0, buf);
}

void c4_scalar_losses() {
  ObjectiveConfig cfg;
  cfg.tau = 1.0;
  Matrix u2(2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    u2(i, 0) = 1.0;
    u2(i, 1) = 0.5;
  }
  const double case_a = pairwise_loss(0, u2, u2, cfg);
  Matrix u3(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    u3(i, 0) = 0.3;
    u3(i, 1) = -0.7;
  }
  PositiveSets p(3);
  p.add_labeled(0, 0);
  p.add_labeled(1, 0);
  const double case_b = supervised_pairwise_loss(0, u3, u3, p, cfg);
  const double err = std::max(std::abs(case_a - std::log(3.0)), std::abs(case_b - std::log(3.0)));
  char buf[120];
  std::snprintf(buf, sizeof buf, "log3 cases: %.9f and %.9f (target 1.098612289, tol 1e-9)",
                case_a, case_b);
  report("C4 scalar loss values", err < 1e-9, buf);
}

void c5_augmentation_stats() {
  // an SBM large enough to carry about 10k undirected edges
  const Graph g = generate_sbm({100, 100}, 0.5, 0.5, 4, 0.5, 505);
  const double e = static_cast<double>(g.num_undirected_edges());
  const double sigma_e = std::sqrt(e * 0.2 * 0.8);
  bool ok = true;
  double worst_edge_dev = 0.0, worst_mask_dev = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<std::size_t> row_ptr, col;
    drop_edges(g, 0.2, seed, row_ptr, col);
    const double kept = static_cast<double>(col.size()) / 2.0;
    worst_edge_dev = std::max(worst_edge_dev, std::abs(kept - 0.8 * e) / sigma_e);
  }
  const Matrix x(40, 1000, 1.0);
  const double sigma_m = std::sqrt(1000.0 * 0.3 * 0.7);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Matrix out;
    std::vector<std::uint8_t> mask;
    mask_features(x, 0.3, seed, out, mask);
    double masked = 0.0;
    for (std::uint8_t kept : mask) masked += kept ? 0.0 : 1.0;
    worst_mask_dev = std::max(worst_mask_dev, std::abs(masked - 300.0) / sigma_m);
  }
  ok = worst_edge_dev <= 4.0 && worst_mask_dev <= 4.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "edges=%.0f: worst kept-count deviation %.2f sigma; mask m=1000: worst %.2f "
                "sigma (limit 4)",
                e, worst_edge_dev, worst_mask_dev);
  report("C5 augmentation statistics", ok, buf);
}

void c6_homophily_direction() {
  const auto t0 = clock_type::now();
  ExperimentConfig cfg = sbm_config();
  cfg.budget_spec = "12";
  cfg.strategy = "minimax";
  const Graph g = load_experiment_graph(cfg);
  int wins = 0;
  double sel_sum = 0.0, graph_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RunResult r = run_experiment(cfg, g, seed);
    if (r.homophily.selected_mean > r.homophily.graph_mean) ++wins;
    sel_sum += r.homophily.selected_mean;
    graph_sum += r.homophily.graph_mean;
  }
  const double elapsed = seconds_since(t0);
  char buf[180];
  std::snprintf(buf, sizeof buf,
                "%d/10 seeds selected>graph (need >=9); means %.3f vs %.3f; %.1fs (limit 300)",
                wins, sel_sum / 10.0, graph_sum / 10.0, elapsed);
  report("C6 homophily direction", wins >= 9 && elapsed < 300.0, buf);
}

void c7_strategy_ordering() {
  const auto t0 = clock_type::now();
  // hardest regime found for this family: few noisy feature dimensions so
  // the probe is not saturated; one fresh graph per seed
  ExperimentConfig cfg = sbm_config();
  cfg.sbm.feat_dim = 3;
  cfg.sbm.feat_noise = 3.0;
  cfg.warmup_epochs = 100;
  cfg.epochs_per_round = 10;
  cfg.budget_spec = "20C";
  std::vector<double> minimax_f1, random_f1;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Graph g = generate_sbm(cfg.sbm.blocks, cfg.sbm.p_in, cfg.sbm.p_out, cfg.sbm.feat_dim,
                                 cfg.sbm.feat_noise, seed);
    ExperimentConfig mm = cfg;
    mm.strategy = "minimax";
    minimax_f1.push_back(run_experiment(mm, g, seed).final_micro);
    ExperimentConfig rnd = cfg;
    rnd.strategy = "random";
    random_f1.push_back(run_experiment(rnd, g, seed).final_micro);
  }
  const double m = mean(minimax_f1) * 100.0, r = mean(random_f1) * 100.0;
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "minimax %.2f vs random %.2f Micro-F1 (need gap >= 3 points); %.1fs (limit 900)",
                m, r, elapsed);
  report("C7 strategy ordering", m - r >= 3.0 && elapsed < 900.0, buf);
}

void c8_cora() {
  const char* env = std::getenv("GAL_CORA_BUNDLE");
  std::string dir = env ? env : "data/cora";
  if (!std::filesystem::exists(std::filesystem::path(dir) / "meta.json")) {
    std::printf("[SKIP] C8 citation-network reproduction: no converted bundle at %s "
                "(soft criterion, not gated)\n",
                dir.c_str());
    return;
  }
  ExperimentConfig cfg;
  cfg.use_sbm = false;
  cfg.dataset_path = dir;
  cfg.budget_spec = "20C";
  cfg.strategy = "minimax";
  const Graph g = load_experiment_graph(cfg);
  std::vector<double> f1;
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    f1.push_back(run_experiment(cfg, g, seed).final_micro * 100.0);
  const double m = mean(f1);
  char buf[120];
  std::snprintf(buf, sizeof buf, "Micro-F1 %.2f (target 85.35 +/- 3.0, soft)", m);
  // soft criterion: reported but never gates the exit code
  std::printf("[%s] C8 citation-network reproduction: %s\n",
              std::abs(m - 85.35) <= 3.0 ? "PASS" : "INFO", buf);
}

void c9_lambda_trend() {
  ExperimentConfig cfg = sbm_config();
  cfg.budget_spec = "12";
  cfg.strategy = "minimax";
  const Graph g = load_experiment_graph(cfg);
  std::vector<double> high, low;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ExperimentConfig a = cfg;
    a.objective.lambda = 1.0;
    high.push_back(run_experiment(a, g, seed).final_micro);
    ExperimentConfig b = cfg;
    b.objective.lambda = 0.2;
    low.push_back(run_experiment(b, g, seed).final_micro);
  }
  const double h = mean(high) * 100.0, l = mean(low) * 100.0;
  char buf[120];
  std::snprintf(buf, sizeof buf, "Micro-F1 lambda=1.0: %.2f, lambda=0.2: %.2f (need >=)", h, l);
  report("C9 lambda monotone trend", h >= l, buf);
}

void c10_determinism() {
  ExperimentConfig cfg = sbm_config();
  cfg.sbm.blocks = {20, 20};
  cfg.budget_spec = "5";
  cfg.hidden = 8;
  cfg.dim = 6;
  cfg.warmup_epochs = 10;
  cfg.epochs_per_round = 3;
  const Graph g = load_experiment_graph(cfg);
  bool ok = true;
  for (const char* strategy : {"minimax", "random"}) {
    ExperimentConfig c = cfg;
    c.strategy = strategy;
    const RunResult a = run_experiment(c, g, 9);
    const RunResult b = run_experiment(c, g, 9);
    std::string csv_a = records_csv_header(), csv_b = records_csv_header();
    for (const auto& r : a.rounds) csv_a += "\n" + record_csv_row(r);
    for (const auto& r : b.rounds) csv_b += "\n" + record_csv_row(r);
    ok = ok && csv_a == csv_b;
  }
  report("C10 determinism", ok, ok ? "byte-identical CSV across reruns"
                                   : "CSV bytes differ between identical runs");
}

}  // namespace

int main() {
  c1_gradients();
  c2_objective_reduction();
  c3_minimax_oracle();
  c4_scalar_losses();
  c5_augmentation_stats();
  c6_homophily_direction();
  c7_strategy_ordering();
  c8_cora();
  c9_lambda_trend();
  c10_determinism();
  std::printf("%s\n", failures == 0 ? "ALL GATED CRITERIA PASSED"
                                    : "GATED CRITERIA FAILED");
  return failures == 0 ? 0 : 1;
}
