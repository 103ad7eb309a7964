#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmsonline/arrivals.hpp"
#include "mmsonline/core.hpp"
#include "mmsonline/rng.hpp"

namespace mmsonline {

enum class InvariantLevel {
  none,
  /// Only the remaining-value/saturation dichotomy and the output guarantee.
  cheap,
  /// Additionally pool purity, reserve value bound, disjointness and
  /// monotone saturation after every step.
  full,
};

struct AdversarialOptions {
  InvariantLevel checks = InvariantLevel::full;
  /// Seeded-random choice of reserve pick, fill order and release order
  /// instead of FIFO / ascending / LIFO.
  std::optional<std::uint64_t> tieBreakSeed;
  bool trace = false;
};

/// Input to the 1/k algorithm. `units` holds valuations scaled so that each
/// non-exempt type's benchmark share is 1 (the normalized MMS, or the
/// proportional share on a restricted item set). Exempt types are served an
/// empty bundle and never claim bags.
struct AdversarialProblem {
  const Instance* units = nullptr;
  Bundle items;
  int nAgents = 0;
  std::vector<bool> exempt;

  static AdversarialProblem fromNormalized(const NormalizedInstance& instance);
  int k() const { return units->kTypes(); }
};

struct StepOutcome {
  Bundle bundle;
  bool fromReserve = false;
  FailureReason failure = FailureReason::none;
};

/// Tentative reserves G_i (a bundle may sit in several), remaining items R and
/// the unsaturated set. Item pool P is R minus every reserved item.
class TentativeState {
 public:
  /// Runs the high-value preprocessing: for each type in ascending order, up
  /// to n items worth >= 1/k become singleton reserves (one shared bundle per
  /// item across types).
  TentativeState(AdversarialProblem problem, AdversarialOptions options = {});

  /// Serves the next arriving agent of `type` and returns its bundle.
  StepOutcome step(int type);

  int agentsArrived() const { return t_; }
  int nAgents() const { return problem_.nAgents; }
  int k() const { return problem_.k(); }
  const Rational& threshold() const { return threshold_; }
  std::size_t reserveCount(int type) const { return reserves_.at(type).size(); }
  /// Bundles currently reserved for `type`, front = next to be handed out.
  std::vector<Bundle> reserves(int type) const;
  bool isUnsaturated(int type) const { return unsaturated_.at(type) != 0; }
  std::vector<int> unsaturatedTypes() const;
  /// Items not yet allocated.
  Bundle remaining() const;
  /// Remaining items not held by any reserve, ascending.
  Bundle pool() const;
  const Rational& remainingValue(int type) const { return remainingValue_.at(type); }

  const std::vector<std::string>& violations() const { return violations_; }
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  struct Stored {
    Bundle bundle;
    int holders = 0;
  };

  Rational valueOf(int type, const Bundle& b) const;
  bool claims(int type) const { return !problem_.exempt[type]; }
  int makeBundle(Bundle b);
  void reserve(int type, int id);
  void dropHolder(int id);
  void allocate(const Bundle& bundle, int storedId);
  std::vector<int> poolItems();
  void release();
  void refreshSaturation();
  void checkInvariants(const StepOutcome& outcome, int type,
                       const std::vector<char>& unsaturatedBefore);
  void checkReserveBound(int id, const char* when);
  void violation(std::string what);
  void emitTrace(int type, const StepOutcome& outcome);

  AdversarialProblem problem_;
  AdversarialOptions options_;
  std::optional<Rng> rng_;
  Rational threshold_;
  int t_ = 0;
  std::vector<Stored> store_;
  std::vector<std::deque<int>> reserves_;
  std::vector<int> holderOf_;  // item -> live stored bundle id, or -1
  std::vector<char> inRemaining_;
  std::vector<char> unsaturated_;
  std::vector<Rational> remainingValue_;
  std::vector<std::string> violations_;
  std::vector<std::string> trace_;
};

struct AdversarialRun {
  std::vector<Grant> grants;
  std::vector<std::string> violations;
  std::vector<std::string> trace;
};

/// Serves `problem.nAgents` agents drawn from `arrivals`.
AdversarialRun runAdversarialOn(const AdversarialProblem& problem, ArrivalSource& arrivals,
                                const AdversarialOptions& options = {});

struct RunResult {
  Allocation allocation;
  TrialReport report;
  std::vector<std::string> violations;
};

/// The 1/k algorithm on a normalized instance; report ratios are against the
/// normalized MMS and success is judged at alpha = 1/k.
RunResult runAdversarial(const NormalizedInstance& instance, ArrivalSource& arrivals,
                         const AdversarialOptions& options = {});

/// Online allocation rule driven one agent at a time.
class OnlinePolicy {
 public:
  virtual ~OnlinePolicy() = default;
  virtual Bundle serve(int type) = 0;
  virtual std::string name() const = 0;
};

using PolicyFactory = std::function<std::unique_ptr<OnlinePolicy>(const Instance&)>;

/// The 1/k algorithm behind the policy interface; normalizes with the exact solver.
PolicyFactory adversarialPolicy(AdversarialOptions options = {});
/// Baseline: fill from the lowest remaining item ids until the bundle reaches
/// the agent's full MMS.
PolicyFactory greedyPolicy();

/// Binary instance forcing the sqrt(k) lower bound: items split into mu1
/// intervals of n items, an all-ones type, one type per interval and four
/// types per interval pair over half-interval unions.
struct LowerBoundInstance {
  enum class Role { allOnes, interval, pair, filler };
  struct TypeInfo {
    Role role = Role::filler;
    int first = -1;   // interval index (interval) or l (pair)
    int second = -1;  // r (pair)
    int halves = -1;  // 0..3: (half of l) * 2 + (half of r)
  };

  int k = 0;
  int n = 0;
  int mu1 = 0;
  Instance instance;
  std::vector<TypeInfo> catalog;

  int definedTypes() const { return 4 * (mu1 * (mu1 - 1) / 2) + mu1 + 1; }
  int intervalOf(int item) const { return item / n; }
  /// 0 for the first half of its interval, 1 for the second.
  int halfOf(int item) const { return (item % n) < n / 2 ? 0 : 1; }
  int intervalType(int r) const;
  int pairType(int l, int r, int halves) const;
};

struct LowerBoundOutcome {
  TrialReport report;  // ratios against the true (unnormalized) MMS
  Allocation allocation;
  std::string scenario;  // sameInterval | twoIntervals | singleItem
  int targetType = -1;
  /// Some agent's ratio is strictly below 2 / (sqrt(k) - 2).
  bool belowBound = false;
  Rational firstAgentRatio;
};

/// Plays the lower-bound instance against `policy`: an all-ones agent first,
/// then n - 1 agents of the type that lost two valued items to it.
LowerBoundOutcome adaptiveLowerBoundAdversary(int k, int n, const PolicyFactory& policy);

/// ratio < 2 / (sqrt(k) - 2), decided exactly.
bool belowSqrtBound(const Rational& ratio, int k);

}  // namespace mmsonline
