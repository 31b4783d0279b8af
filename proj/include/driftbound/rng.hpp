#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "driftbound/core.hpp"

namespace driftbound {

/// SplitMix64 finalizer; used to derive statistically independent child
/// seeds from a parent seed and an index.
std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index = 0);

// One random stream: a 64-bit Mersenne Twister plus a persistent normal
// distribution (its cached second variate is part of the stream state).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline void fill_standard_normal(Rng& rng, VecRef out) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.normal();
}
Vector standard_normal(Rng& rng, Eigen::Index n);
inline double uniform01(Rng& rng) { return rng.uniform(); }
inline double exponential1(Rng& rng) { return rng.exponential(); }

}  // namespace driftbound
