#pragma once

#include <vector>

#include "gal/matrix.hpp"

namespace gal {

struct ObjectiveConfig {
  double tau = 0.5;     // temperature
  double lambda = 1.0;  // supervised-positive weight
  // Eq-literal behaviour: supervised positives also appear inside the
  // negative sum. Flag provided for sensitivity analysis.
  bool exclude_positives_from_negatives = false;
  // When true, supervised positives are taken from both views (doubling
  // the positive contributions); default uses the anchor's own view.
  bool positives_from_both_views = false;
};

// P(i): indices of other labeled nodes sharing node i's label; empty for
// unlabeled nodes.
class PositiveSets {
 public:
  explicit PositiveSets(std::size_t n = 0) : sets_(n) {}

  std::size_t size() const { return sets_.size(); }
  const std::vector<std::size_t>& of(std::size_t i) const { return sets_[i]; }

  // Registers a newly labeled node: links it with every already-labeled
  // node of the same class.
  void add_labeled(std::size_t v, int label);

 private:
  std::vector<std::size_t> labeled_;
  std::vector<int> label_of_labeled_;
  std::vector<std::vector<std::size_t>> sets_;
};

// theta(u, v) = exp(cos(u, v) / tau), with a 1e-12 additive norm floor.
double critic(const std::vector<double>& u, const std::vector<double>& v, double tau);

// Eq-2 style NT-Xent term for anchor i; `u` and `v` are the projected
// embedding matrices of the two views.
double pairwise_loss(std::size_t i, const Matrix& u, const Matrix& v,
                     const ObjectiveConfig& cfg);

// Label-augmented pairwise term for anchor i.
double supervised_pairwise_loss(std::size_t i, const Matrix& u, const Matrix& v,
                                const PositiveSets& p, const ObjectiveConfig& cfg);

// Unified objective: (1/2n) sum_i [1/(|P(i)|+1)] [l(u_i,v_i) + l(v_i,u_i)].
double total_objective(const Matrix& u, const Matrix& v, const PositiveSets& p,
                       const ObjectiveConfig& cfg);

// Same value, also producing dJ/dU and dJ/dV.
double total_objective_grad(const Matrix& u, const Matrix& v, const PositiveSets& p,
                            const ObjectiveConfig& cfg, Matrix& du, Matrix& dv);

}  // namespace gal
