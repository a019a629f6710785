#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gal/graph.hpp"
#include "gal/matrix.hpp"

namespace gal {

// Softmax-regression probe trained on frozen embeddings.
struct ProbeModel {
  Matrix w;                 // d x C
  std::vector<double> b;    // C
};

struct ProbeConfig {
  double lr = 0.01;
  std::size_t max_iters = 2000;
  double tol = 1e-7;  // stop when the loss change drops below this
};

struct HomophilyReport {
  double selected_mean = 0.0;
  double graph_mean = 0.0;
  double improvement_pct = 0.0;
};

// Full-batch gradient descent on cross-entropy over row-normalized
// embeddings; deterministic (zero init).
ProbeModel train_probe(const Matrix& h, const std::vector<std::pair<std::size_t, int>>& labeled,
                       int num_classes, const ProbeConfig& cfg = {});

// Softmax probabilities, rows summing to 1 within 1e-9.
Matrix predict_proba(const ProbeModel& m, const Matrix& h);

std::vector<int> predict_labels(const ProbeModel& m, const Matrix& h);

// (micro, macro) F1; micro equals accuracy in single-label multiclass.
std::pair<double, double> f1_scores(const std::vector<int>& pred, const std::vector<int>& truth,
                                    int num_classes);

HomophilyReport homophily_report(const Graph& g, const std::vector<std::size_t>& selected);

}  // namespace gal
