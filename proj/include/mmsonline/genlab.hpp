#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mmsonline/adversarial.hpp"
#include "mmsonline/arrivals.hpp"
#include "mmsonline/core.hpp"

namespace mmsonline {

/// Two agents, m items. The first type likes everything; the second type is
/// revealed after the first grant and likes two of the granted items.
struct Example1 {
  Instance instance;  // the first type only, n = 2

  /// The second type for a given first grant: value 1 on the two lowest
  /// granted items (topped up with the lowest ungranted items when the grant
  /// has fewer than two).
  Valuation secondType(const Bundle& firstGrant) const;
  /// `instance` with the second type appended.
  Instance withSecondType(const Bundle& firstGrant) const;
};

Example1 genExample1(int m);

/// k = 2, 3n items: type 0 values items [0, 2n) at 1/2 - eps and [2n, 3n) at
/// 2 eps; type 1 values n - 1 of the large items at 1 each and the small
/// items at 1/n each, so it can bundle all small items into one bag.
/// Requires 0 < eps < 1/(4n).
Instance genAdvCounterexample(int n, const Rational& epsilon);

/// The bags type 1 reserves in the pre-saturation demo: the n - 1 large
/// items as singletons plus one bag of every small item.
std::vector<Bundle> advCounterexampleBags(int n);

LowerBoundInstance genLowerBound(int k, int n);

/// 2n items; type 0 values all at 1/2; type i >= 1 (1-based index i + 1)
/// values the last two at 1/2 +- epsilon / (2 (i + 1)).
Instance genTightnessHalf(int k, int n, const Rational& epsilon = Rational(1, 10));
/// Same instance, normalized with the consecutive pairs as witnesses.
NormalizedInstance certifiedTightnessHalf(int k, int n, const Rational& epsilon = Rational(1, 10));

/// Normalizes a 0/1 instance in which every type values exactly n items:
/// valued items become singleton witness bundles, zero items join the last.
NormalizedInstance certifiedUnitInstance(const Instance& instance);

struct TightnessPk {
  Instance instance;
  TypeDistribution distribution;
  int universalItems = 0;  // n - n/k leading items valued 1 by every type
  int reducedAgents = 0;   // n' = n/k
};

/// m = n + n/k items, each type values n items at 1. Probabilities are
/// 1/(k-1) for the first k-2 types, 1/(k-1) - pk and pk for the last two.
/// Requires k >= 3, k | n, n/k >= k - 2 and 0 < pk <= 1/(2(k-1)).
TightnessPk genTightnessPk(int k, int n, const Rational& pk);

struct ValueModel {
  enum class Kind { uniform, binaryDensity, clustered };
  Kind kind = Kind::uniform;
  Rational density = Rational(1, 2);  // binaryDensity only

  static ValueModel uniform() { return {}; }
  static ValueModel binary(const Rational& q) { return {Kind::binaryDensity, q}; }
  static ValueModel clustered() { return {Kind::clustered, Rational(0)}; }
};

/// Seeded random instance. uniform: values a/b with a in [1, 60], b in [1, 6];
/// binaryDensity(q): 1 with probability q, else 0; clustered: each type has a
/// home block of items valued in [10, 20], other items in [0, 3].
Instance genRandom(int n, int m, int k, const ValueModel& model, std::uint64_t seed);

struct PlantedOptions {
  int itemsPerBundle = 6;
  /// Common denominator of every item value.
  std::int64_t denominator = 2520;
  /// Per-type strict upper bound on item values (unbounded when absent).
  std::vector<std::optional<Rational>> valueCap;
};

/// Normalized instance with n * itemsPerBundle items whose witness partitions
/// are planted: each type splits the items into n random bundles, each a
/// random composition of 1. Certified without calling the exact solver.
NormalizedInstance genPlanted(int n, int k, const PlantedOptions& options, std::uint64_t seed);

}  // namespace mmsonline
