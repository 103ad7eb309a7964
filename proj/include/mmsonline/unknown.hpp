#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmsonline/adversarial.hpp"
#include "mmsonline/core.hpp"
#include "mmsonline/stochastic.hpp"

namespace mmsonline {

struct UnknownParams {
  Rational c = Rational(1, 20);
  Rational eta = Rational(1, 2);
  Rational alpha = Rational(1, 3);
  Rational epsilon;       // (5 + 4c) / 18
  Rational epsilonPrime;  // (2 + c) / 3

  /// Requires 0 < c < 1/10.
  static UnknownParams make(const Rational& c, const Rational& eta);
  /// ceil(n^epsilonPrime).
  std::int64_t learnWindow(int n) const;
  /// Exponent e of delta = n^(-e).
  Rational deltaExponent() const { return (epsilonPrime - c) / Rational(2); }
  /// Both parameter identities that tie epsilon, epsilonPrime and c together.
  bool identitiesHold() const;
};

/// Empirical frequencies count_j / |observed| over k types.
TypeDistribution learnDistribution(std::span<const int> observed, int k);

/// Independent Bernoulli(p) membership in the first part, item by item in
/// ascending order, from a stream seeded with `seed`.
std::pair<Bundle, Bundle> randomSplit(const Bundle& items, const Rational& p, std::uint64_t seed);

/// value >= (1 - n^(-e)) * target, decided exactly.
bool meetsDeltaTarget(const Rational& value, int n, const Rational& e, const Rational& target);

struct UnknownOptions {
  InvariantLevel adversarialChecks = InvariantLevel::cheap;
  LowCOptions lowC;
};

struct UnknownDRun {
  Allocation allocation;
  TrialReport report;
  std::string branch;  // degenerate | learnFromC | split | singletons
  std::int64_t window = 0;
  Bundle universal;
  std::optional<TypeDistribution> learned;
  Rational splitProbability;
  Bundle b1;
  Bundle b2;
  Rational minB1Value;
  /// min_i v_i(B1) >= (1 - delta) 2 k window.
  bool splitConcentrated = false;
  /// Agents of the learning stage that got 1/k of their share on B1.
  int learnersMeetingRestrictedShare = 0;
  int learners = 0;
  std::optional<LowCState> lowC;
  std::vector<std::string> violations;
};

/// Learns the type distribution from the first window of agents while serving
/// them, then hands the rest to the known-distribution pipeline.
/// `arrivals` holds n original type ids; `splitSeed` drives the item split.
UnknownDRun runUnknownD(const NormalizedInstance& instance, const UnknownParams& params,
                        std::span<const int> arrivals, std::uint64_t splitSeed,
                        const UnknownOptions& options = {});

}  // namespace mmsonline
