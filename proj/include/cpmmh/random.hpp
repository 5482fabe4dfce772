// Seeded random stream. One stream drives one chain; every consumer pulls
// variates in a fixed documented order so whole experiments replay from a
// single master seed. Gaussians come from the quantile transform of an
// open-interval uniform, keeping the draw sequence fully specified by the
// mt19937_64 output and independent of library internals.
#pragma once

#include <cstdint>
#include <random>

#include "cpmmh/math.hpp"

namespace cpmmh {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0,1): (k + 0.5) * 2^-53 with k the top
  // 53 bits, so neither endpoint is representable in the output.
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_quantile(uniform01()); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; decorrelates consecutive master/index pairs.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Non-overlapping child seed for replicate/task `index` under one master
// seed. Distinct (master, index) pairs map to distinct streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(master ^ mix_seed(index + 1));
}

}  // namespace cpmmh
