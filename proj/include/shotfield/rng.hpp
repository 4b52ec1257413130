// Copyright 2026 shotfield developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace shotfield {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// xoshiro256++ generator.  Streams for parallel replicates are derived
/// from a master seed and a list of integer ids (experiment, lambda
/// index, replicate index) by chaining splitmix64, so replicate k is
/// reproducible in isolation and results do not depend on thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  Rng(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t s = master;
    for (std::uint64_t id : ids) {
      s ^= 0x9e3779b97f4a7c15ull * (id + 1);
      s = splitmix64(s);
    }
    reseed(s);
  }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
    have_spare_ = false;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on (0,1): top 53 bits, forced nonzero so log() is safe.
  double uniform01() {
    const std::uint64_t m = (next_u64() >> 11) | 1ull;
    return static_cast<double>(m) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double exponential(double rate = 1.0) { return -std::log(uniform01()) / rate; }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  /// Poisson count by accumulating exponential inter-arrival times.
  /// Cost is O(mean) draws, which matches the cost of consuming the
  /// points afterwards.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::uint64_t n = 0;
    double acc = exponential();
    while (acc <= mean) {
      ++n;
      acc += exponential();
    }
    return n;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace shotfield
