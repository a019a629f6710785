#include "gal/model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "gal/errors.hpp"

namespace gal {

namespace {

void glorot(Matrix& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
  for (double& x : w.data) x = rng.uniform(-limit, limit);
}

double elu(double x) { return x > 0.0 ? x : std::exp(x) - 1.0; }
double elu_grad(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

// Z = H * G^T + b (row-wise affine map with G applied as G * h per row)
Matrix affine(const Matrix& h, const Matrix& g, const std::vector<double>& b) {
  Matrix z = matmul_nt(h, g);
  for (std::size_t i = 0; i < z.rows; ++i)
    for (std::size_t j = 0; j < z.cols; ++j) z(i, j) += b[j];
  return z;
}

void check_tensor(const Matrix& t, const char* name) {
  for (double x : t.data)
    if (!std::isfinite(x)) throw NumericError(std::string("non-finite gradient in ") + name);
}

void check_vec(const std::vector<double>& t, const char* name) {
  for (double x : t)
    if (!std::isfinite(x)) throw NumericError(std::string("non-finite gradient in ") + name);
}

}  // namespace

ModelParams ModelParams::init(std::size_t feat_dim, std::size_t hidden, std::size_t out,
                              std::uint64_t seed) {
  ModelParams p;
  p.w1 = Matrix(feat_dim, hidden);
  p.w2 = Matrix(hidden, out);
  p.g1 = Matrix(out, out);
  p.g2 = Matrix(out, out);
  p.b1.assign(out, 0.0);
  p.b2.assign(out, 0.0);
  Rng rng(derive_seed(seed, streams::kInit));
  glorot(p.w1, rng);
  glorot(p.w2, rng);
  glorot(p.g1, rng);
  glorot(p.g2, rng);
  return p;
}

ModelGrads ModelGrads::zeros_like(const ModelParams& p) {
  ModelGrads g;
  g.w1 = Matrix(p.w1.rows, p.w1.cols);
  g.w2 = Matrix(p.w2.rows, p.w2.cols);
  g.g1 = Matrix(p.g1.rows, p.g1.cols);
  g.g2 = Matrix(p.g2.rows, p.g2.cols);
  g.b1.assign(p.b1.size(), 0.0);
  g.b2.assign(p.b2.size(), 0.0);
  return g;
}

void ModelGrads::check_finite() const {
  check_tensor(w1, "W1");
  check_tensor(w2, "W2");
  check_tensor(g1, "G1");
  check_tensor(g2, "G2");
  check_vec(b1, "b1");
  check_vec(b2, "b2");
}

AdamState AdamState::init(const ModelParams& p, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("adam: lr must be positive");
  AdamState s;
  s.lr = lr;
  s.m = ModelGrads::zeros_like(p);
  s.v = ModelGrads::zeros_like(p);
  return s;
}

Matrix gcn_forward(const NormalizedAdjacency& adj, const Matrix& x, const ModelParams& p) {
  if (x.cols != p.w1.rows || adj.n != x.rows)
    throw std::invalid_argument("gcn_forward: shape mismatch");
  Matrix z1 = matmul(spmm(adj, x), p.w1);
  for (double& v : z1.data) v = v > 0.0 ? v : 0.0;
  Matrix h = matmul(spmm(adj, z1), p.w2);
  for (double v : h.data)
    if (!std::isfinite(v)) throw NumericError("gcn_forward: non-finite embedding");
  return h;
}

GcnCache gcn_forward_cached(const NormalizedAdjacency& adj, const Matrix& x,
                            const ModelParams& p) {
  if (x.cols != p.w1.rows || adj.n != x.rows)
    throw std::invalid_argument("gcn_forward: shape mismatch");
  GcnCache c;
  c.t1 = spmm(adj, x);
  c.z1 = matmul(c.t1, p.w1);
  Matrix r = c.z1;
  for (double& v : r.data) v = v > 0.0 ? v : 0.0;
  c.t2 = spmm(adj, r);
  c.h = matmul(c.t2, p.w2);
  c.proj_z = affine(c.h, p.g1, p.b1);
  c.proj_e = c.proj_z;
  for (double& v : c.proj_e.data) v = elu(v);
  c.u = affine(c.proj_e, p.g2, p.b2);
  for (double v : c.u.data)
    if (!std::isfinite(v)) throw NumericError("gcn_forward: non-finite projection");
  return c;
}

std::vector<double> project(const std::vector<double>& h, const ModelParams& p) {
  const std::size_t d = p.g1.rows;
  std::vector<double> z(d, 0.0), out(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double s = p.b1[i];
    for (std::size_t j = 0; j < d; ++j) s += p.g1(i, j) * h[j];
    z[i] = elu(s);
  }
  for (std::size_t i = 0; i < d; ++i) {
    double s = p.b2[i];
    for (std::size_t j = 0; j < d; ++j) s += p.g2(i, j) * z[j];
    out[i] = s;
  }
  return out;
}

void gcn_backward_embeddings(const NormalizedAdjacency& adj, const GcnCache& cache,
                             const Matrix& dh, const ModelParams& p, ModelGrads& grads) {
  axpy(1.0, matmul_tn(cache.t2, dh), grads.w2);
  Matrix dr = spmm(adj, matmul_nt(dh, p.w2));  // A_norm symmetric
  for (std::size_t i = 0; i < dr.size(); ++i)
    if (cache.z1.data[i] <= 0.0) dr.data[i] = 0.0;
  axpy(1.0, matmul_tn(cache.t1, dr), grads.w1);
}

void gcn_backward(const NormalizedAdjacency& adj, const GcnCache& cache, const Matrix& du,
                  const ModelParams& p, ModelGrads& grads) {
  // projection head
  axpy(1.0, matmul_tn(du, cache.proj_e), grads.g2);
  for (std::size_t i = 0; i < du.rows; ++i)
    for (std::size_t j = 0; j < du.cols; ++j) grads.b2[j] += du(i, j);
  Matrix dz = matmul(du, p.g2);
  for (std::size_t i = 0; i < dz.size(); ++i) dz.data[i] *= elu_grad(cache.proj_z.data[i]);
  axpy(1.0, matmul_tn(dz, cache.h), grads.g1);
  for (std::size_t i = 0; i < dz.rows; ++i)
    for (std::size_t j = 0; j < dz.cols; ++j) grads.b1[j] += dz(i, j);
  Matrix dh = matmul(dz, p.g1);
  gcn_backward_embeddings(adj, cache, dh, p, grads);
}

namespace {

void adam_tensor(std::vector<double>& x, const std::vector<double>& g, std::vector<double>& m,
                 std::vector<double>& v, const AdamState& s, double bc1, double bc2) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
    x[i] -= s.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + s.eps);
  }
}

}  // namespace

void adam_step(ModelParams& p, const ModelGrads& grads, AdamState& s) {
  ++s.t;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  adam_tensor(p.w1.data, grads.w1.data, s.m.w1.data, s.v.w1.data, s, bc1, bc2);
  adam_tensor(p.w2.data, grads.w2.data, s.m.w2.data, s.v.w2.data, s, bc1, bc2);
  adam_tensor(p.g1.data, grads.g1.data, s.m.g1.data, s.v.g1.data, s, bc1, bc2);
  adam_tensor(p.g2.data, grads.g2.data, s.m.g2.data, s.v.g2.data, s, bc1, bc2);
  adam_tensor(p.b1, grads.b1, s.m.b1, s.v.b1, s, bc1, bc2);
  adam_tensor(p.b2, grads.b2, s.m.b2, s.v.b2, s, bc1, bc2);
}

// Checkpoint layout: one JSON line with tensor shapes, then the tensors'
// little-endian float64 payload in the header's order.
void save_checkpoint(const ModelParams& p, const std::string& path) {
  nlohmann::json header{{"w1", {p.w1.rows, p.w1.cols}}, {"w2", {p.w2.rows, p.w2.cols}},
                        {"g1", {p.g1.rows, p.g1.cols}}, {"b1", {p.b1.size()}},
                        {"g2", {p.g2.rows, p.g2.cols}}, {"b2", {p.b2.size()}}};
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint for writing: " + path);
  f << header.dump() << "\n";
  auto dump = [&f](const std::vector<double>& v) {
    f.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  dump(p.w1.data);
  dump(p.w2.data);
  dump(p.g1.data);
  dump(p.b1);
  dump(p.g2.data);
  dump(p.b2);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint: " + path);
  std::string line;
  std::getline(f, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint header: " + std::string(e.what()));
  }
  ModelParams p;
  auto load_mat = [&](const char* key) {
    const auto shape = header.at(key);
    Matrix m(shape[0].get<std::size_t>(), shape[1].get<std::size_t>());
    f.read(reinterpret_cast<char*>(m.data.data()),
           static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!f) throw DataError("truncated checkpoint payload");
    return m;
  };
  auto load_vec = [&](const char* key) {
    std::vector<double> v(header.at(key)[0].get<std::size_t>());
    f.read(reinterpret_cast<char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!f) throw DataError("truncated checkpoint payload");
    return v;
  };
  p.w1 = load_mat("w1");
  p.w2 = load_mat("w2");
  p.g1 = load_mat("g1");
  p.b1 = load_vec("b1");
  p.g2 = load_mat("g2");
  p.b2 = load_vec("b2");
  return p;
}

}  // namespace gal
