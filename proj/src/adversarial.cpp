#include "mmsonline/adversarial.hpp"

#include <algorithm>

#include "json.hpp"
#include "mmsonline/genlab.hpp"
#include "mmsonline/mms.hpp"

namespace mmsonline {

AdversarialProblem AdversarialProblem::fromNormalized(const NormalizedInstance& instance) {
  AdversarialProblem p;
  p.units = &instance.base;
  std::vector<int> all(static_cast<std::size_t>(instance.m()));
  for (int g = 0; g < instance.m(); ++g) all[g] = g;
  p.items = Bundle(std::move(all));
  p.nAgents = instance.n();
  p.exempt = instance.zeroMms;
  return p;
}

TentativeState::TentativeState(AdversarialProblem problem, AdversarialOptions options)
    : problem_(std::move(problem)), options_(options) {
  if (problem_.units == nullptr) throw InputError("adversarial problem without valuations");
  if (problem_.nAgents < 1) throw InputError("adversarial problem needs at least one agent");
  const int k = problem_.k();
  const int m = problem_.units->mItems;
  if (problem_.exempt.empty()) problem_.exempt.assign(k, false);
  if (static_cast<int>(problem_.exempt.size()) != k) throw InputError("exempt mask has wrong length");
  if (options_.tieBreakSeed) rng_.emplace(*options_.tieBreakSeed);

  threshold_ = Rational(1, k);
  reserves_.resize(k);
  holderOf_.assign(m, -1);
  inRemaining_.assign(m, 0);
  remainingValue_.assign(k, Rational(0));
  for (const int g : problem_.items) {
    if (g >= m) throw InputError("item " + std::to_string(g) + " out of range");
    inRemaining_[g] = 1;
  }
  for (int i = 0; i < k; ++i) remainingValue_[i] = value(problem_.units->values(i), problem_.items);

  // High-valued items become singleton reserves, shared across types.
  const auto n = static_cast<std::size_t>(problem_.nAgents);
  std::vector<int> singletonOf(m, -1);
  for (int i = 0; i < k; ++i) {
    if (!claims(i)) continue;
    const auto vals = problem_.units->values(i);
    for (const int g : problem_.items) {
      if (reserves_[i].size() >= n) break;
      if (vals[g] < threshold_) continue;
      if (singletonOf[g] < 0) {
        singletonOf[g] = makeBundle(Bundle{g});
        holderOf_[g] = singletonOf[g];
      }
      reserve(i, singletonOf[g]);
    }
  }
  unsaturated_.assign(k, 0);
  for (int i = 0; i < k; ++i) unsaturated_[i] = claims(i) && reserves_[i].size() < n;

  if (options_.checks == InvariantLevel::full) {
    for (const int g : poolItems()) {
      for (int i = 0; i < k; ++i) {
        if (unsaturated_[i] && problem_.units->values(i)[g] >= threshold_) {
          violation("pool purity after preprocessing: item " + std::to_string(g) +
                    " high for unsaturated type " + std::to_string(i));
        }
      }
    }
  }
}

Rational TentativeState::valueOf(int type, const Bundle& b) const {
  return value(problem_.units->values(type), b);
}

int TentativeState::makeBundle(Bundle b) {
  store_.push_back({std::move(b), 0});
  return static_cast<int>(store_.size()) - 1;
}

void TentativeState::reserve(int type, int id) {
  reserves_[type].push_back(id);
  ++store_[id].holders;
}

void TentativeState::dropHolder(int id) {
  if (--store_[id].holders == 0) {
    for (const int g : store_[id].bundle) holderOf_[g] = -1;
  }
}

std::vector<Bundle> TentativeState::reserves(int type) const {
  std::vector<Bundle> out;
  for (const int id : reserves_.at(type)) out.push_back(store_[id].bundle);
  return out;
}

std::vector<int> TentativeState::unsaturatedTypes() const {
  std::vector<int> out;
  for (int i = 0; i < k(); ++i) {
    if (unsaturated_[i]) out.push_back(i);
  }
  return out;
}

Bundle TentativeState::remaining() const {
  Bundle out;
  for (int g = 0; g < static_cast<int>(inRemaining_.size()); ++g) {
    if (inRemaining_[g]) out.pushBackSorted(g);
  }
  return out;
}

Bundle TentativeState::pool() const {
  Bundle out;
  for (int g = 0; g < static_cast<int>(inRemaining_.size()); ++g) {
    if (inRemaining_[g] && holderOf_[g] < 0) out.pushBackSorted(g);
  }
  return out;
}

std::vector<int> TentativeState::poolItems() {
  std::vector<int> out;
  for (int g = 0; g < static_cast<int>(inRemaining_.size()); ++g) {
    if (inRemaining_[g] && holderOf_[g] < 0) out.push_back(g);
  }
  if (rng_) rng_->shuffle(out.begin(), out.end());
  return out;
}

void TentativeState::allocate(const Bundle& bundle, int storedId) {
  for (const int g : bundle) {
    if (!inRemaining_[g] || (holderOf_[g] >= 0 && holderOf_[g] != storedId)) {
      violation("disjointness: item " + std::to_string(g) + " allocated while unavailable");
    }
    inRemaining_[g] = 0;
    holderOf_[g] = -1;
    for (int j = 0; j < k(); ++j) remainingValue_[j] -= problem_.units->values(j)[g];
  }
  if (storedId >= 0) {
    for (auto& r : reserves_) r.erase(std::remove(r.begin(), r.end(), storedId), r.end());
    store_[storedId].holders = 0;
  }
}

void TentativeState::release() {
  const auto keep = static_cast<std::size_t>(problem_.nAgents - t_);
  for (auto& r : reserves_) {
    while (r.size() > keep) {
      std::size_t pos = r.size() - 1;
      if (rng_) pos = rng_->below(r.size());
      const int id = r[pos];
      r.erase(r.begin() + static_cast<std::ptrdiff_t>(pos));
      dropHolder(id);
    }
  }
}

void TentativeState::refreshSaturation() {
  const auto demand = static_cast<std::size_t>(problem_.nAgents - t_);
  for (int j = 0; j < k(); ++j) {
    if (unsaturated_[j] && reserves_[j].size() >= demand) unsaturated_[j] = 0;
  }
}

void TentativeState::violation(std::string what) {
  violations_.push_back("step " + std::to_string(t_) + ": " + std::move(what));
}

void TentativeState::checkReserveBound(int id, const char* when) {
  for (int j = 0; j < k(); ++j) {
    if (unsaturated_[j] && valueOf(j, store_[id].bundle) > Rational(1)) {
      violation(std::string("reserve bound ") + when + ": bundle worth more than 1 to type " +
                std::to_string(j));
    }
  }
}

StepOutcome TentativeState::step(int type) {
  if (t_ >= problem_.nAgents) throw InputError("more arrivals than agents");
  if (type < 0 || type >= k()) throw InputError("arriving type " + std::to_string(type) + " out of range");
  ++t_;
  const std::vector<char> before = unsaturated_;
  StepOutcome out;

  if (!claims(type)) {
    // zero-MMS type: nothing is owed
  } else if (!reserves_[type].empty()) {
    std::size_t pos = 0;
    if (rng_) pos = rng_->below(reserves_[type].size());
    const int id = reserves_[type][pos];
    out.bundle = store_[id].bundle;
    out.fromReserve = true;
    allocate(out.bundle, id);
  } else {
    const auto demand = static_cast<std::size_t>(problem_.nAgents - t_);
    const auto& units = *problem_.units;
    std::vector<int> bag;
    std::vector<Rational> bagValue(k(), Rational(0));
    bool served = false;
    for (const int g : poolItems()) {
      bag.push_back(g);
      for (int j = 0; j < k(); ++j) {
        if (j == type || unsaturated_[j]) bagValue[j] += units.values(j)[g];
      }
      if (bagValue[type] >= threshold_) {
        out.bundle = Bundle(bag);
        allocate(out.bundle, -1);
        served = true;
        break;
      }
      std::vector<int> claimants;
      for (int j = 0; j < k(); ++j) {
        if (j != type && unsaturated_[j] && bagValue[j] >= threshold_) claimants.push_back(j);
      }
      if (claimants.empty()) continue;
      const int id = makeBundle(Bundle(bag));
      for (const int g2 : bag) holderOf_[g2] = id;
      if (options_.checks == InvariantLevel::full) checkReserveBound(id, "at reservation");
      for (const int j : claimants) {
        reserve(j, id);
        if (reserves_[j].size() >= demand) unsaturated_[j] = 0;
      }
      if (options_.checks == InvariantLevel::full) {
        for (int h = 0; h < units.mItems; ++h) {
          if (!inRemaining_[h] || holderOf_[h] >= 0) continue;
          for (int j = 0; j < k(); ++j) {
            if (unsaturated_[j] && units.values(j)[h] >= threshold_) {
              violation("pool purity after reservation: item " + std::to_string(h) +
                        " high for unsaturated type " + std::to_string(j));
            }
          }
        }
      }
      bag.clear();
      std::fill(bagValue.begin(), bagValue.end(), Rational(0));
    }
    if (!served) {
      out.failure = FailureReason::poolExhausted;
      if (options_.checks != InvariantLevel::none) {
        violation("pool exhausted for type " + std::to_string(type));
      }
    }
  }

  release();
  refreshSaturation();
  if (options_.checks != InvariantLevel::none) checkInvariants(out, type, before);
  if (options_.trace) emitTrace(type, out);
  return out;
}

void TentativeState::checkInvariants(const StepOutcome& outcome, int type,
                                     const std::vector<char>& unsaturatedBefore) {
  const auto& units = *problem_.units;
  const int demand = problem_.nAgents - t_;
  if (claims(type) && outcome.failure == FailureReason::none &&
      valueOf(type, outcome.bundle) < threshold_) {
    violation("output guarantee: type " + std::to_string(type) + " served below 1/k");
  }
  for (int i = 0; i < k(); ++i) {
    if (!claims(i)) continue;
    const bool full = static_cast<int>(reserves_[i].size()) == demand;
    if (!full && remainingValue_[i] < Rational(demand)) {
      violation("remaining-value invariant fails for type " + std::to_string(i) + ": |G|=" +
                std::to_string(reserves_[i].size()) + ", v(R)=" + remainingValue_[i].str() +
                ", n-t=" + std::to_string(demand));
    }
  }
  if (options_.checks != InvariantLevel::full) return;

  for (int i = 0; i < k(); ++i) {
    if (unsaturated_[i] && !unsaturatedBefore[i]) {
      violation("saturation not monotone for type " + std::to_string(i));
    }
    for (const int id : reserves_[i]) {
      if (valueOf(i, store_[id].bundle) < threshold_) {
        violation("reserve of type " + std::to_string(i) + " worth less than 1/k");
      }
      for (const int g : store_[id].bundle) {
        if (!inRemaining_[g] || holderOf_[g] != id) {
          violation("reserve bundle overlaps an allocated or foreign item " + std::to_string(g));
        }
      }
    }
  }
  for (int g = 0; g < units.mItems; ++g) {
    if (!inRemaining_[g] || holderOf_[g] >= 0) continue;
    for (int i = 0; i < k(); ++i) {
      if (unsaturated_[i] && units.values(i)[g] >= threshold_) {
        violation("pool purity: item " + std::to_string(g) + " high for unsaturated type " +
                  std::to_string(i));
      }
    }
  }
}

void TentativeState::emitTrace(int type, const StepOutcome& outcome) {
  nlohmann::json line;
  line["t"] = t_;
  line["type"] = type;
  line["source"] = !claims(type)          ? "exempt"
                   : outcome.fromReserve  ? "reserve"
                   : outcome.failure == FailureReason::none ? "bag"
                                                            : "none";
  line["bundle"] = outcome.bundle.items();
  line["failure"] = std::string(toString(outcome.failure));
  std::vector<std::size_t> sizes;
  for (const auto& r : reserves_) sizes.push_back(r.size());
  line["reserves"] = sizes;
  line["unsaturated"] = unsaturatedTypes();
  line["remaining"] = remaining().size();
  line["pool"] = pool().size();
  line["violations"] = violations_.size();
  trace_.push_back(line.dump());
}

AdversarialRun runAdversarialOn(const AdversarialProblem& problem, ArrivalSource& arrivals,
                                const AdversarialOptions& options) {
  TentativeState state(problem, options);
  AdversarialRun run;
  std::vector<int> fixed;
  const bool adaptive = arrivals.kind() == ArrivalSource::Kind::adaptiveAdversary;
  if (!adaptive) fixed = arrivals.take(problem.nAgents);
  for (int a = 0; a < problem.nAgents; ++a) {
    const int type = adaptive ? arrivals.next(a, run.grants) : fixed[a];
    auto outcome = state.step(type);
    run.grants.push_back({type, std::move(outcome.bundle), outcome.failure});
  }
  run.violations = state.violations();
  run.trace = state.trace();
  return run;
}

RunResult runAdversarial(const NormalizedInstance& instance, ArrivalSource& arrivals,
                         const AdversarialOptions& options) {
  const auto problem = AdversarialProblem::fromNormalized(instance);
  auto run = runAdversarialOn(problem, arrivals, options);
  RunResult result;
  for (std::size_t a = 0; a < run.grants.size(); ++a) {
    result.allocation.entries.push_back(
        {static_cast<int>(a), run.grants[a].type, run.grants[a].bundle});
  }
  result.allocation.validate(instance.m());
  result.report = verifyAllocation(instance, result.allocation, Rational(1, instance.k()));
  for (const auto& g : run.grants) {
    if (g.failure != FailureReason::none) {
      result.report.failureReason = g.failure;
      result.report.succeededAtAlpha = false;
      break;
    }
  }
  if (instance.k() == 1) result.report.flag("singleType");
  if (!run.violations.empty()) result.report.flag("invariantViolation");
  result.report.stepTrace = std::move(run.trace);
  result.violations = std::move(run.violations);
  return result;
}

namespace {

class AdversarialPolicyImpl : public OnlinePolicy {
 public:
  AdversarialPolicyImpl(const Instance& instance, AdversarialOptions options)
      : normalized_(normalize(instance, exactSolver())),
        state_(AdversarialProblem::fromNormalized(normalized_), options) {}

  Bundle serve(int type) override { return state_.step(type).bundle; }
  std::string name() const override { return "adversarial"; }

 private:
  NormalizedInstance normalized_;
  TentativeState state_;
};

class GreedyPolicyImpl : public OnlinePolicy {
 public:
  explicit GreedyPolicyImpl(const Instance& instance)
      : instance_(instance), taken_(instance.mItems, 0) {
    for (int i = 0; i < instance.kTypes(); ++i) {
      mms_.push_back(mmsExact(instance.values(i), instance.nAgents).value);
    }
  }

  Bundle serve(int type) override {
    Bundle out;
    if (mms_.at(type).isZero()) return out;
    Rational got(0);
    for (int g = 0; g < instance_.mItems && got < mms_[type]; ++g) {
      if (taken_[g]) continue;
      taken_[g] = 1;
      out.pushBackSorted(g);
      got += instance_.values(type)[g];
    }
    return out;
  }
  std::string name() const override { return "greedy"; }

 private:
  Instance instance_;
  std::vector<char> taken_;
  std::vector<Rational> mms_;
};

}  // namespace

PolicyFactory adversarialPolicy(AdversarialOptions options) {
  return [options](const Instance& instance) -> std::unique_ptr<OnlinePolicy> {
    return std::make_unique<AdversarialPolicyImpl>(instance, options);
  };
}

PolicyFactory greedyPolicy() {
  return [](const Instance& instance) -> std::unique_ptr<OnlinePolicy> {
    return std::make_unique<GreedyPolicyImpl>(instance);
  };
}

int LowerBoundInstance::intervalType(int r) const {
  if (r < 0 || r >= mu1) throw InputError("interval index out of range");
  return 1 + r;
}

int LowerBoundInstance::pairType(int l, int r, int halves) const {
  if (l < 0 || r >= mu1 || l >= r || halves < 0 || halves > 3) {
    throw InputError("pair type index out of range");
  }
  // Pairs (l, r) are numbered lexicographically.
  int index = 0;
  for (int a = 0; a < l; ++a) index += mu1 - 1 - a;
  index += r - l - 1;
  return 1 + mu1 + 4 * index + halves;
}

bool belowSqrtBound(const Rational& ratio, int k) {
  if (k <= 4) throw InputError("the sqrt(k) bound needs k > 4");
  if (ratio <= Rational(0)) return true;
  // ratio < 2/(sqrt(k)-2)  <=>  sqrt(k) < 2/ratio + 2  <=>  k < (2/ratio + 2)^2
  const Rational s = Rational(2) / ratio + Rational(2);
  return Rational(k) < s * s;
}

LowerBoundOutcome adaptiveLowerBoundAdversary(int k, int n, const PolicyFactory& policyFactory) {
  const LowerBoundInstance lb = genLowerBound(k, n);
  const Instance& inst = lb.instance;
  auto policy = policyFactory(inst);

  LowerBoundOutcome out;
  std::vector<char> taken(inst.mItems, 0);
  auto serve = [&](int type) {
    Bundle b = policy->serve(type);
    for (const int g : b) {
      if (g < 0 || g >= inst.mItems) {
        throw ValidationError(policy->name() + " returned unknown item " + std::to_string(g));
      }
      if (taken[g]) {
        throw ValidationError(policy->name() + " handed out item " + std::to_string(g) + " twice");
      }
      taken[g] = 1;
    }
    const int agent = static_cast<int>(out.allocation.entries.size());
    out.allocation.entries.push_back({agent, type, b});
    return b;
  };

  const Bundle first = serve(0);
  std::vector<std::vector<int>> perInterval(lb.mu1);
  for (const int g : first) perInterval[lb.intervalOf(g)].push_back(g);
  int target = -1;
  for (int r = 0; r < lb.mu1 && target < 0; ++r) {
    if (perInterval[r].size() >= 2) {
      out.scenario = "sameInterval";
      target = lb.intervalType(r);
    }
  }
  if (target < 0 && first.size() >= 2) {
    const int g1 = first.items()[0];
    const int g2 = first.items()[1];
    out.scenario = "twoIntervals";
    target = lb.pairType(lb.intervalOf(g1), lb.intervalOf(g2), lb.halfOf(g1) * 2 + lb.halfOf(g2));
  }
  if (target < 0) {
    out.scenario = "singleItem";
    target = 0;
  }
  out.targetType = target;
  for (int a = 1; a < n; ++a) serve(target);

  std::vector<Rational> mms;
  for (int i = 0; i < inst.kTypes(); ++i) mms.push_back(mmsExact(inst.values(i), n).value);
  out.allocation.validate(inst.mItems);
  out.report = verifyAgainst(inst, mms, out.allocation, Rational(1, k));
  out.firstAgentRatio = out.report.perAgentRatio.at(0);
  out.belowBound = std::any_of(out.report.perAgentRatio.begin(), out.report.perAgentRatio.end(),
                               [k](const Rational& r) { return belowSqrtBound(r, k); });
  return out;
}

}  // namespace mmsonline
