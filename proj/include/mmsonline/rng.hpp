#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "mmsonline/rational.hpp"

namespace mmsonline {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the named substream `stream` for trial `trial` under `master`.
/// Independent of the order in which trials execute.
std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t trial, std::string_view stream);

/// Seeded stream with platform-independent draws (mt19937_64 output is fixed by
/// the standard; the distributions below are implemented here for the same
/// reason).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// Exact Bernoulli(p) for rational p in [0, 1].
  bool bernoulli(const Rational& p);

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::swap(first[i - 1], first[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mmsonline
