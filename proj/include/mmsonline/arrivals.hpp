#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mmsonline/core.hpp"
#include "mmsonline/rng.hpp"

namespace mmsonline {

struct Grant {
  int type = 0;
  Bundle bundle;
  FailureReason failure = FailureReason::none;
};

/// Where the agent types come from. Adaptive sources see every earlier grant.
class ArrivalSource {
 public:
  enum class Kind { fixedSequence, iidSampler, adaptiveAdversary, exhaustiveEnumerator };
  using Adaptive = std::function<int(int agent, std::span<const Grant> history)>;

  static ArrivalSource fixed(std::vector<int> types);
  static ArrivalSource iid(const TypeDistribution& distribution, std::uint64_t seed);
  static ArrivalSource adaptive(Adaptive policy);
  /// Visits every sequence in [0,k)^n in lexicographic order.
  static void enumerate(int k, int n, const std::function<void(std::span<const int>)>& visit);

  Kind kind() const { return kind_; }
  /// Type of agent `agent` (0-based).
  int next(int agent, std::span<const Grant> history);
  /// The materialized sequence of a non-adaptive source.
  std::vector<int> take(int n);

 private:
  Kind kind_ = Kind::fixedSequence;
  std::vector<int> fixed_;
  TypeDistribution distribution_;
  std::shared_ptr<Rng> rng_;
  Adaptive adaptive_;
};

/// Exact i.i.d. draws of original type ids from `distribution`.
std::vector<int> sampleArrivals(const TypeDistribution& distribution, int n, std::uint64_t seed);

}  // namespace mmsonline
