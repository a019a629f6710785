#pragma once

#include <cstdint>
#include <random>

namespace gal {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent substream seed for a named consumer of a master seed.
// Changing one consumer's draws never perturbs another's.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) ^ splitmix64(index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(gen_);
  }
  // uniform integer in [0, n)
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
  }
  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Stream tags for the experiment pipeline.
namespace streams {
constexpr std::uint64_t kInit = 1;
constexpr std::uint64_t kAugment = 2;
constexpr std::uint64_t kSplit = 3;
constexpr std::uint64_t kSelect = 4;
constexpr std::uint64_t kSbm = 5;
constexpr std::uint64_t kProbe = 6;
}  // namespace streams

}  // namespace gal
