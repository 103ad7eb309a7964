#include "mmsonline/stochastic.hpp"

#include <algorithm>

#include "mmsonline/precise.hpp"
#include "mmsonline/rng.hpp"

namespace mmsonline {

Rational StochasticParams::alphaForEta(const Rational& eta) {
  if (eta < Rational(0)) throw InputError("eta must be non-negative");
  return Rational(1) / (Rational(2) * (Rational(1) + eta));
}

StochasticParams StochasticParams::fromEta(const Rational& eta, const Rational& epsilon) {
  if (epsilon <= Rational(0) || epsilon >= Rational(1, 2)) {
    throw InputError("epsilon must lie in (0, 1/2)");
  }
  return {alphaForEta(eta), eta, epsilon};
}

std::int64_t saturationCap(int nPrime, const Rational& p, const Rational& epsilon) {
  if (nPrime <= 0 || p.isZero()) return 0;
  const Rational mu = Rational(nPrime) * p;
  return precise::floorOffsetRootTerm(mu, nPrime, epsilon, mu);
}

SlackBracket slackBracket(int nPrime, std::span<const Rational> sortedProbs,
                          const Rational& epsilon) {
  constexpr std::int64_t scale = 1 << 20;
  SlackBracket b{Rational(0), Rational(0)};
  if (nPrime <= 0) return b;
  for (const auto& p : sortedProbs) {
    if (p.isZero()) continue;
    b.lo += precise::rootTermLowerBound(nPrime, epsilon, Rational(nPrime) * p, scale);
    b.hi += Rational(1, scale);
  }
  b.hi += b.lo;
  return b;
}

bool highCCondition(int cSize, int n, int k, const Rational& p1, const Rational& epsilon) {
  if (n < 1) return true;
  const Rational x = Rational(cSize) - Rational(n) * (Rational(1) - Rational(1, k));
  return precise::compareRootTerm(x, n, epsilon, Rational(n) * p1) >= 0;
}

bool LowCState::allSaturated() const {
  return std::all_of(saturated.begin(), saturated.end(), [](bool s) { return s; });
}

namespace {

std::size_t countMinus(const Bundle& a, const Bundle& b) {
  std::size_t n = 0;
  for (const int g : a) n += b.contains(g) ? 0 : 1;
  return n;
}

std::vector<int> ordering(const std::vector<Bundle>& t, int nPrime,
                          const std::vector<Rational>& probs) {
  const int k = static_cast<int>(t.size());
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const Rational half = Rational(nPrime) * probs[i] / Rational(2);
      if (Rational(static_cast<std::int64_t>(countMinus(t[i], t[j]))) >= half) {
        std::vector<int> l{i};
        for (int r = 0; r < k; ++r) {
          if (r != i && r != j) l.push_back(r);
        }
        l.push_back(j);
        return l;
      }
    }
  }
  std::vector<int> l(k);
  for (int r = 0; r < k; ++r) l[r] = r;
  return l;
}

}  // namespace

LowCState preprocessLowC(const NormalizedInstance& instance, const Bundle& items, int nPrime,
                         const TypeDistribution& distribution, const Rational& alpha,
                         const Rational& epsilon, const LowCOptions& options) {
  const int k = distribution.k();
  if (k != instance.k()) throw InputError("distribution and instance disagree on k");
  if (nPrime < 0) throw InputError("negative agent count");
  std::optional<Rng> rng;
  if (options.tieBreakSeed) rng.emplace(*options.tieBreakSeed);

  LowCState s;
  s.nPrime = nPrime;
  s.distribution = distribution;
  s.items = items;
  const auto& probs = distribution.sortedProbs();
  auto vals = [&](int rank) { return instance.base.values(distribution.originalOfRank(rank)); };

  for (int r = 0; r < k; ++r) {
    Bundle t;
    for (const int g : items) {
      if (vals(r)[g] >= alpha) t.pushBackSorted(g);
    }
    s.highValueSets.push_back(std::move(t));
    s.caps.push_back(saturationCap(nPrime, probs[r], epsilon));
  }
  s.ordering = ordering(s.highValueSets, nPrime, probs);
  s.reserves.resize(k);
  s.consumed.resize(k);
  s.singletonCount.assign(k, 0);
  s.saturatedAfterTurns.assign(k, false);

  std::vector<char> available(instance.m(), 0);
  for (const int g : items) available[g] = 1;
  const Bundle& lastSet = s.highValueSets[s.lastType()];
  std::vector<int> picked;

  for (const int i : s.ordering) {
    auto& reserve = s.reserves[i];
    while (static_cast<std::int64_t>(reserve.size()) < s.caps[i]) {
      std::vector<int> preferred;
      std::vector<int> fallback;
      for (const int g : s.highValueSets[i]) {
        if (!available[g]) continue;
        (lastSet.contains(g) ? fallback : preferred).push_back(g);
      }
      const auto& pool = preferred.empty() ? fallback : preferred;
      if (pool.empty()) break;
      const int g = rng ? pool[rng->below(pool.size())] : pool.front();
      available[g] = 0;
      picked.push_back(g);
      reserve.push_back(Bundle{g});
    }
    s.consumed[i] = Bundle(picked);
    s.singletonCount[i] = static_cast<int>(reserve.size());
    s.saturatedAfterTurns[i] = static_cast<std::int64_t>(reserve.size()) == s.caps[i];
  }

  if (options.checks) {
    const SlackBracket z = slackBracket(nPrime, probs, epsilon);
    const Rational base = Rational(nPrime) * (Rational(1) - probs.back() / Rational(2));
    for (int i = 0; i < k; ++i) {
      if (s.saturatedAfterTurns[i]) continue;
      for (int g = 0; g < instance.m(); ++g) {
        if (available[g] && vals(i)[g] >= alpha) {
          s.violations.push_back("high-value item " + std::to_string(g) +
                                 " left for unsaturated type rank " + std::to_string(i));
        }
      }
      const Rational excess = Rational(static_cast<std::int64_t>(s.highValueSets[i].size())) - base;
      if (excess > z.hi) {
        s.violations.push_back("unsaturated type rank " + std::to_string(i) +
                               " has too many high-value items");
      }
    }
  }

  // Bag filling over what is left.
  std::vector<int> unsaturated;
  for (int r = 0; r < k; ++r) {
    if (!s.saturatedAfterTurns[r]) unsaturated.push_back(r);
  }
  std::vector<int> rest;
  for (const int g : items) {
    if (available[g]) rest.push_back(g);
  }
  if (rng) rng->shuffle(rest.begin(), rest.end());
  std::size_t cursor = 0;
  while (!unsaturated.empty() && cursor < rest.size()) {
    std::vector<int> bag;
    std::vector<Rational> bagValue(k, Rational(0));
    std::vector<int> claimants;
    while (cursor < rest.size() && claimants.empty()) {
      const int g = rest[cursor++];
      bag.push_back(g);
      for (const int r : unsaturated) {
        bagValue[r] += vals(r)[g];
        if (bagValue[r] >= alpha) claimants.push_back(r);
      }
    }
    if (claimants.empty()) break;  // an unclaimed tail stays in R
    const int owner = rng ? claimants[rng->below(claimants.size())] : claimants.front();
    if (options.checks) {
      for (const int r : unsaturated) {
        if (bagValue[r] > 2 * alpha) {
          s.violations.push_back("bag worth more than 2 alpha to unsaturated type rank " +
                                 std::to_string(r));
        }
      }
    }
    for (const int g : bag) available[g] = 0;
    s.reserves[owner].push_back(Bundle(bag));
    ++s.bagCount;
    if (static_cast<std::int64_t>(s.reserves[owner].size()) == s.caps[owner]) {
      unsaturated.erase(std::find(unsaturated.begin(), unsaturated.end(), owner));
    }
  }
  for (const int g : items) {
    if (available[g]) s.leftover.pushBackSorted(g);
  }
  s.saturated.assign(k, false);
  for (int r = 0; r < k; ++r) {
    s.saturated[r] = static_cast<std::int64_t>(s.reserves[r].size()) == s.caps[r];
    if (options.checks && static_cast<std::int64_t>(s.reserves[r].size()) > s.caps[r]) {
      s.violations.push_back("reserve of type rank " + std::to_string(r) + " exceeds its cap");
    }
  }
  return s;
}

std::vector<Grant> runLowC(LowCState& state, std::span<const int> arrivals,
                           std::optional<std::uint64_t> tieBreakSeed) {
  std::optional<Rng> rng;
  if (tieBreakSeed) rng.emplace(*tieBreakSeed);
  std::vector<Grant> out;
  for (const int type : arrivals) {
    auto& reserve = state.reserves.at(state.distribution.rankOf(type));
    if (reserve.empty()) {
      out.push_back({type, {}, FailureReason::emptyReserve});
      continue;
    }
    std::size_t pos = rng ? rng->below(reserve.size()) : 0;
    out.push_back({type, reserve[pos], FailureReason::none});
    reserve.erase(reserve.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return out;
}

std::vector<Bundle> restrictedWitness(const NormalizedInstance& instance, int type,
                                      const Bundle& items, int nBundles) {
  const auto& witness = instance.witnessPartitions.at(type);
  if (nBundles <= 0) return {};
  std::vector<char> present(instance.m(), 0);
  for (const int g : items) present[g] = 1;
  std::vector<Bundle> untouched;
  std::vector<int> rest;
  for (const auto& b : witness) {
    const bool whole = std::all_of(b.begin(), b.end(), [&](int g) { return present[g] != 0; });
    if (whole && !b.empty()) {
      untouched.push_back(b);
    } else {
      for (const int g : b) {
        if (present[g]) rest.push_back(g);
      }
    }
  }
  if (static_cast<int>(untouched.size()) < nBundles) {
    throw InputError("only " + std::to_string(untouched.size()) +
                     " witness bundles survive the item restriction");
  }
  std::vector<Bundle> out(untouched.begin(), untouched.begin() + (nBundles - 1));
  for (auto it = untouched.begin() + (nBundles - 1); it != untouched.end(); ++it) {
    rest.insert(rest.end(), it->begin(), it->end());
  }
  out.emplace_back(std::move(rest));
  return out;
}

HighCState preprocessHighC(const NormalizedInstance& instance, const Bundle& items, int nAgents,
                           const TypeDistribution& distribution, const Rational& alpha) {
  HighCState s;
  const Bundle c = universallyHighValued(instance, alpha, items);
  s.cSize = static_cast<int>(c.size());
  const int typeOne = distribution.originalOfRank(0);
  const auto partition = restrictedWitness(instance, typeOne, items, nAgents);
  std::vector<Bundle> extras;
  for (const auto& bundle : partition) {
    std::vector<int> keep;
    int inC = 0;
    for (const int g : bundle) {
      if (c.contains(g) && inC++ > 0) {
        extras.push_back(Bundle{g});
      } else {
        keep.push_back(g);
      }
    }
    if (inC == 0) {
      // capped at |N| - |C| so that |G_1| + |A| = |N|
      if (static_cast<int>(s.typeOneReserve.size()) < nAgents - s.cSize) {
        s.typeOneReserve.emplace_back(std::move(keep));
      }
      continue;
    }
    s.shared.emplace_back(std::move(keep));
  }
  s.shared.insert(s.shared.end(), extras.begin(), extras.end());
  return s;
}

std::vector<Grant> runHighC(HighCState& state, const TypeDistribution& distribution,
                            std::span<const int> arrivals) {
  const int typeOne = distribution.originalOfRank(0);
  std::vector<Grant> out;
  for (const int type : arrivals) {
    std::deque<Bundle>* source = &state.shared;
    if (type == typeOne && !state.typeOneReserve.empty()) source = &state.typeOneReserve;
    if (source->empty()) {
      out.push_back({type, {}, FailureReason::emptyReserve});
      continue;
    }
    out.push_back({type, source->front(), FailureReason::none});
    source->pop_front();
  }
  return out;
}

KnownDOutcome dispatchKnownD(const NormalizedInstance& instance, const Bundle& items, int nAgents,
                             const TypeDistribution& distribution, const StochasticParams& params,
                             std::span<const int> arrivals, const LowCOptions& options) {
  if (distribution.k() != instance.k()) throw InputError("distribution and instance disagree on k");
  if (static_cast<int>(arrivals.size()) != nAgents) {
    throw InputError("expected " + std::to_string(nAgents) + " arrivals, got " +
                     std::to_string(arrivals.size()));
  }
  KnownDOutcome out;
  out.universal = universallyHighValued(instance, params.alpha, items);
  const int cSize = static_cast<int>(out.universal.size());
  if (highCCondition(cSize, nAgents, instance.k(), distribution.sortedProbs().front(),
                     params.epsilon)) {
    out.path = "highC";
    auto state = preprocessHighC(instance, items, nAgents, distribution, params.alpha);
    if (options.checks && static_cast<int>(state.shared.size()) != cSize) {
      out.violations.push_back("shared reserve size differs from |C|");
    }
    out.grants = runHighC(state, distribution, arrivals);
    return out;
  }
  const int served = std::min(cSize, nAgents);
  for (int t = 0; t < served; ++t) {
    out.grants.push_back({arrivals[t], Bundle{out.universal.items()[t]}, FailureReason::none});
  }
  if (served == nAgents) {
    out.path = "singletons";
    return out;
  }
  out.path = "lowC";
  std::vector<int> reduced;
  for (const int g : items) {
    if (!out.universal.contains(g)) reduced.push_back(g);
  }
  out.lowC = preprocessLowC(instance, Bundle(std::move(reduced)), nAgents - served, distribution,
                            params.alpha, params.epsilon, options);
  auto rest = runLowC(*out.lowC, arrivals.subspan(served), options.tieBreakSeed);
  out.grants.insert(out.grants.end(), rest.begin(), rest.end());
  out.violations.insert(out.violations.end(), out.lowC->violations.begin(),
                        out.lowC->violations.end());
  return out;
}

std::pair<Allocation, TrialReport> assemble(const NormalizedInstance& instance,
                                            std::span<const Grant> grants, const Rational& alpha) {
  Allocation allocation;
  for (std::size_t a = 0; a < grants.size(); ++a) {
    allocation.entries.push_back({static_cast<int>(a), grants[a].type, grants[a].bundle});
  }
  allocation.validate(instance.m());
  TrialReport report = verifyAllocation(instance, allocation, alpha);
  for (const auto& g : grants) {
    if (g.failure != FailureReason::none) {
      report.failureReason = g.failure;
      report.succeededAtAlpha = false;
      break;
    }
  }
  return {std::move(allocation), std::move(report)};
}

KnownDRun runKnownD(const NormalizedInstance& instance, const TypeDistribution& distribution,
                    const StochasticParams& params, std::span<const int> arrivals,
                    const LowCOptions& options) {
  std::vector<int> all(static_cast<std::size_t>(instance.m()));
  for (int g = 0; g < instance.m(); ++g) all[g] = g;
  KnownDRun run;
  run.outcome = dispatchKnownD(instance, Bundle(std::move(all)), instance.n(), distribution, params,
                               arrivals, options);
  auto [allocation, report] = assemble(instance, run.outcome.grants, params.alpha);
  run.allocation = std::move(allocation);
  run.report = std::move(report);
  run.report.flag("path:" + run.outcome.path);
  if (run.outcome.lowC) {
    run.report.flag(run.outcome.lowC->allSaturated() ? "allSaturated" : "unsaturated");
  }
  if (!run.outcome.violations.empty()) run.report.flag("invariantViolation");
  return run;
}

}  // namespace mmsonline
