#pragma once

#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmsonline/errors.hpp"
#include "mmsonline/rational.hpp"

namespace mmsonline {

using Valuation = std::vector<Rational>;

/// Sorted set of item indices.
class Bundle {
 public:
  Bundle() = default;
  Bundle(std::initializer_list<int> items);
  /// Sorts; throws InputError on duplicates or negative ids.
  explicit Bundle(std::vector<int> items);

  const std::vector<int>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool contains(int item) const;
  /// Appending keeps the set sorted only if `item` exceeds every member; callers
  /// that fill in ascending order use this, others go through the constructor.
  void pushBackSorted(int item);

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  friend bool operator==(const Bundle&, const Bundle&) = default;

 private:
  std::vector<int> items_;
};

/// Additive value of `bundle` under `valuation`. Throws InputError on bad ids.
Rational value(std::span<const Rational> valuation, const Bundle& bundle);
/// Sum over all items.
Rational totalValue(std::span<const Rational> valuation);

struct Instance {
  int nAgents = 0;
  int mItems = 0;
  std::vector<Valuation> typeValues;
  std::vector<std::string> typeNames;

  int kTypes() const { return static_cast<int>(typeValues.size()); }
  std::span<const Rational> values(int type) const { return typeValues.at(type); }
  /// Throws InputError when n < 1, k < 1, lengths differ or a value is negative.
  void validate() const;
};

struct MmsResult {
  Rational value;
  std::vector<Bundle> witnessPartition;
  bool exact = true;
  /// Bracket reported in bound-only mode; equals [value, value] when exact.
  Rational lowerBound;
  Rational upperBound;
  std::uint64_t nodes = 0;
};

/// Computes the n-bundle maximin share of one valuation.
using MmsSolver = std::function<MmsResult(std::span<const Rational>, int)>;

/// Instance rescaled so every non-degenerate type has MMS exactly 1.
struct NormalizedInstance {
  Instance base;                                   // rescaled valuations
  Instance original;                               // input before rescaling
  std::vector<Rational> originalMms;               // per type
  std::vector<std::vector<Bundle>> witnessPartitions;  // per type, n bundles
  std::vector<bool> zeroMms;                       // per type

  int n() const { return base.nAgents; }
  int m() const { return base.mItems; }
  int k() const { return base.kTypes(); }
  bool isZeroMms(int type) const { return zeroMms.at(type); }
  /// MMS of the rescaled type: 1, or 0 for degenerate types.
  Rational normalizedMms(int type) const { return isZeroMms(type) ? Rational(0) : Rational(1); }

  /// Accepts an instance whose witness partitions already have every bundle
  /// worth exactly 1 (so MMS = 1 is certified by v(M) = n). Throws InputError
  /// otherwise. Used for generated instances far beyond exact-solver scale.
  static NormalizedInstance fromCertified(Instance instance,
                                          std::vector<std::vector<Bundle>> witnesses);
};

NormalizedInstance normalize(const Instance& instance, const MmsSolver& solver);

/// Items every non-degenerate type values at least `alpha`.
Bundle universallyHighValued(const NormalizedInstance& instance, const Rational& alpha);
/// Same, restricted to `candidates`.
Bundle universallyHighValued(const NormalizedInstance& instance, const Rational& alpha,
                             const Bundle& candidates);

struct AllocationEntry {
  int agent = 0;
  int type = 0;
  Bundle bundle;
};

struct Allocation {
  std::vector<AllocationEntry> entries;
  /// Throws ValidationError naming the first overlapping pair or bad item.
  void validate(int mItems) const;
};

/// Type distribution sorted non-increasingly; rank r is the 1-based type
/// index r+1, `permutationToOriginal[r]` the caller's type id.
class TypeDistribution {
 public:
  TypeDistribution() = default;
  /// Probabilities indexed by original type id; must be >= 0 and sum to 1.
  static TypeDistribution fromProbabilities(std::vector<Rational> byOriginalType);

  int k() const { return static_cast<int>(sorted_.size()); }
  const std::vector<Rational>& sortedProbs() const { return sorted_; }
  const std::vector<int>& permutationToOriginal() const { return toOriginal_; }
  int originalOfRank(int rank) const { return toOriginal_.at(rank); }
  int rankOf(int originalType) const { return toRank_.at(originalType); }
  const Rational& probOf(int originalType) const { return sorted_.at(toRank_.at(originalType)); }
  std::vector<Rational> byOriginalType() const;

 private:
  std::vector<Rational> sorted_;
  std::vector<int> toOriginal_;
  std::vector<int> toRank_;
};

enum class FailureReason { none, emptyReserve, poolExhausted, valueBelowAlpha };
std::string_view toString(FailureReason reason);
FailureReason failureReasonFromString(std::string_view text);

struct TrialReport {
  std::vector<Rational> perAgentRatio;
  Rational minRatio;
  bool succeededAtAlpha = true;
  FailureReason failureReason = FailureReason::none;
  std::vector<std::string> stepTrace;
  std::vector<std::string> flags;

  void flag(const std::string& name);
  bool hasFlag(std::string_view name) const;
};

/// Per-agent ratio v_i(bundle) / MMS_i against the normalized MMS (1, or the
/// vacuous ratio 1 for zero-MMS types). Boundary ratio == alpha succeeds.
TrialReport verifyAllocation(const NormalizedInstance& instance, const Allocation& allocation,
                             const Rational& alpha);
/// Same check against arbitrary per-type MMS values (used for unnormalized
/// constructions such as the lower-bound instance).
TrialReport verifyAgainst(const Instance& instance, std::span<const Rational> mmsPerType,
                          const Allocation& allocation, const Rational& alpha);

}  // namespace mmsonline
