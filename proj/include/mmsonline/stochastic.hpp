#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmsonline/arrivals.hpp"
#include "mmsonline/core.hpp"

namespace mmsonline {

struct StochasticParams {
  Rational alpha = Rational(1, 3);
  Rational eta = Rational(1, 2);
  /// Exponent of the concentration slack; must lie in (0, 1/2).
  Rational epsilon = Rational(1, 10);

  /// alpha = 1 / (2 (1 + eta)).
  static StochasticParams fromEta(const Rational& eta, const Rational& epsilon);
  static Rational alphaForEta(const Rational& eta);
};

/// floor(mu + nPrime^epsilon * sqrt(mu)) with mu = nPrime * p, exactly.
std::int64_t saturationCap(int nPrime, const Rational& p, const Rational& epsilon);

/// Certified bracket [lo, hi] around z = nPrime^epsilon * sum_j sqrt(nPrime p_j).
struct SlackBracket {
  Rational lo;
  Rational hi;
};
SlackBracket slackBracket(int nPrime, std::span<const Rational> sortedProbs,
                          const Rational& epsilon);

/// |C| >= n (1 - 1/k) + n^epsilon * sqrt(n p_1), decided exactly.
bool highCCondition(int cSize, int n, int k, const Rational& p1, const Rational& epsilon);

struct LowCOptions {
  /// Seeded-random item picks, fill order and claimant choice instead of the
  /// lowest-index rules.
  std::optional<std::uint64_t> tieBreakSeed;
  bool checks = true;
};

/// Preprocessing outcome on a reduced instance. Per-type vectors are indexed
/// by rank in the distribution (0 = most probable).
struct LowCState {
  int nPrime = 0;
  TypeDistribution distribution;
  Bundle items;                          // M' at the start
  std::vector<Bundle> highValueSets;     // T
  std::vector<Bundle> consumed;          // T-hat at the end of the turns
  std::vector<std::deque<Bundle>> reserves;
  std::vector<std::int64_t> caps;        // M
  std::vector<int> ordering;             // L, as ranks
  std::vector<bool> saturatedAfterTurns;
  std::vector<bool> saturated;
  std::vector<int> singletonCount;       // bundles reserved during the turns
  int bagCount = 0;
  Bundle leftover;                       // R after bag filling
  std::vector<std::string> violations;

  int k() const { return distribution.k(); }
  bool allSaturated() const;
  int lastType() const { return ordering.back(); }
};

/// Builds the high-value singletons and bag-filled reserves for `nPrime`
/// agents over `items`. An unsaturated outcome is a legal state.
LowCState preprocessLowC(const NormalizedInstance& instance, const Bundle& items, int nPrime,
                         const TypeDistribution& distribution, const Rational& alpha,
                         const Rational& epsilon, const LowCOptions& options = {});

/// Serves each arrival (original type id) from the front of its reserve;
/// an empty reserve yields an empty bundle and emptyReserve.
std::vector<Grant> runLowC(LowCState& state, std::span<const int> arrivals,
                           std::optional<std::uint64_t> tieBreakSeed = std::nullopt);

struct HighCState {
  std::deque<Bundle> typeOneReserve;  // G_1
  std::deque<Bundle> shared;          // A
  int cSize = 0;
};

/// Splits the most probable type's witness partition (restricted to `items`
/// and `nAgents` bundles) so every shared bundle holds exactly one item of C.
HighCState preprocessHighC(const NormalizedInstance& instance, const Bundle& items, int nAgents,
                           const TypeDistribution& distribution, const Rational& alpha);

std::vector<Grant> runHighC(HighCState& state, const TypeDistribution& distribution,
                            std::span<const int> arrivals);

/// A partition of `items` into `nBundles` bundles, each worth at least 1 to
/// `type`, built from its witness partition: witness bundles untouched by the
/// removed items are kept and everything else is merged into the last one.
/// Throws InputError when fewer than `nBundles` witness bundles survive.
std::vector<Bundle> restrictedWitness(const NormalizedInstance& instance, int type,
                                      const Bundle& items, int nBundles);

struct KnownDOutcome {
  std::vector<Grant> grants;
  std::string path;  // highC | lowC | singletons
  Bundle universal;  // C
  std::optional<LowCState> lowC;
  std::vector<std::string> violations;
};

/// Routes between the high-C and low-C pipelines on (`items`, `nAgents`).
/// `arrivals` holds nAgents original type ids.
KnownDOutcome dispatchKnownD(const NormalizedInstance& instance, const Bundle& items, int nAgents,
                             const TypeDistribution& distribution, const StochasticParams& params,
                             std::span<const int> arrivals, const LowCOptions& options = {});

struct KnownDRun {
  Allocation allocation;
  TrialReport report;
  KnownDOutcome outcome;
};

/// Full-instance run; ratios are against the normalized MMS at params.alpha.
KnownDRun runKnownD(const NormalizedInstance& instance, const TypeDistribution& distribution,
                    const StochasticParams& params, std::span<const int> arrivals,
                    const LowCOptions& options = {});

/// Turns grants into an allocation plus its verification report; the first
/// recorded failure reason wins over valueBelowAlpha.
std::pair<Allocation, TrialReport> assemble(const NormalizedInstance& instance,
                                            std::span<const Grant> grants, const Rational& alpha);

}  // namespace mmsonline
