// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace beampred {

/// Seeded random source with platform-independent variates.
///
/// The standard distribution adaptors are implementation-defined, so uniform,
/// normal and integer draws are derived here directly from the 64-bit
/// Mersenne Twister output. Two Rng objects with the same seed produce the
/// same stream on every conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::size_t index(std::size_t n);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Derives an independent seed for a named component from a master seed.
/// FNV-1a of the name, combined with the seed and finalized with splitmix64.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view component);

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace beampred
