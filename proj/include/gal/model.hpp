#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gal/graph.hpp"
#include "gal/matrix.hpp"
#include "gal/rng.hpp"

namespace gal {

// Two-layer GCN encoder weights plus a two-layer MLP projection head.
struct ModelParams {
  Matrix w1;  // m x h
  Matrix w2;  // h x d
  Matrix g1;  // d x d
  std::vector<double> b1;
  Matrix g2;  // d x d
  std::vector<double> b2;

  static ModelParams init(std::size_t feat_dim, std::size_t hidden, std::size_t out,
                          std::uint64_t seed);
  std::size_t num_tensors() const { return 6; }
};

struct ModelGrads {
  Matrix w1, w2, g1, g2;
  std::vector<double> b1, b2;

  static ModelGrads zeros_like(const ModelParams& p);
  void check_finite() const;  // throws NumericError naming the tensor
};

struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t t = 0;
  ModelGrads m, v;  // first/second moment accumulators

  static AdamState init(const ModelParams& p, double lr = 0.001);
};

// Forward activations cached for the backward pass.
struct GcnCache {
  Matrix t1;      // A_norm * X
  Matrix z1;      // pre-activation of layer 1
  Matrix t2;      // A_norm * relu(z1)
  Matrix h;       // embeddings, n x d
  Matrix proj_z;  // pre-activation of projection layer 1
  Matrix proj_e;  // elu(proj_z)
  Matrix u;       // projected embeddings, n x d
};

// H = A_norm * relu(A_norm * X * W1) * W2. ReLU on layer 1, linear output.
Matrix gcn_forward(const NormalizedAdjacency& adj, const Matrix& x, const ModelParams& p);

// Same, keeping activations and the projection head output.
GcnCache gcn_forward_cached(const NormalizedAdjacency& adj, const Matrix& x,
                            const ModelParams& p);

// g(h) = G2 * elu(G1 * h + b1) + b2 for a single row.
std::vector<double> project(const std::vector<double>& h, const ModelParams& p);

// Accumulates gradients for one view given dL/dU (projected) into grads.
// dL/dH contributions from the projection head are chained through the GCN.
void gcn_backward(const NormalizedAdjacency& adj, const GcnCache& cache, const Matrix& du,
                  const ModelParams& p, ModelGrads& grads);

// Backward through the GCN only, for a gradient taken at the embeddings H.
void gcn_backward_embeddings(const NormalizedAdjacency& adj, const GcnCache& cache,
                             const Matrix& dh, const ModelParams& p, ModelGrads& grads);

// Standard bias-corrected Adam update; increments s.t.
void adam_step(ModelParams& p, const ModelGrads& grads, AdamState& s);

void save_checkpoint(const ModelParams& p, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace gal
