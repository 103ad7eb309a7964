#include "mmsonline/unknown.hpp"

#include <algorithm>

#include "mmsonline/precise.hpp"
#include "mmsonline/rng.hpp"

namespace mmsonline {

UnknownParams UnknownParams::make(const Rational& c, const Rational& eta) {
  if (c <= Rational(0) || c >= Rational(1, 10)) throw InputError("c must lie in (0, 1/10)");
  UnknownParams p;
  p.c = c;
  p.eta = eta;
  p.alpha = StochasticParams::alphaForEta(eta);
  p.epsilon = (Rational(5) + Rational(4) * c) / Rational(18);
  p.epsilonPrime = (Rational(2) + c) / Rational(3);
  return p;
}

std::int64_t UnknownParams::learnWindow(int n) const {
  if (n < 1) throw InputError("n must be positive");
  return precise::ceilPow(n, epsilonPrime);
}

bool UnknownParams::identitiesHold() const {
  const Rational quarter(1, 4);
  const Rational lift = Rational(3, 2) * epsilon + quarter;
  return epsilonPrime <= lift && Rational(1) <= epsilonPrime / 2 - c / 2 + lift;
}

TypeDistribution learnDistribution(std::span<const int> observed, int k) {
  if (observed.empty()) throw InputError("cannot learn a distribution from an empty window");
  if (k < 1) throw InputError("k must be positive");
  std::vector<std::int64_t> counts(k, 0);
  for (const int t : observed) {
    if (t < 0 || t >= k) throw InputError("observed type " + std::to_string(t) + " out of range");
    ++counts[t];
  }
  std::vector<Rational> probs;
  const auto w = static_cast<std::int64_t>(observed.size());
  for (const auto c : counts) probs.emplace_back(c, w);
  return TypeDistribution::fromProbabilities(std::move(probs));
}

std::pair<Bundle, Bundle> randomSplit(const Bundle& items, const Rational& p, std::uint64_t seed) {
  if (p < Rational(0) || p > Rational(1)) throw InputError("split probability must lie in [0, 1]");
  Rng rng(seed);
  Bundle first;
  Bundle second;
  for (const int g : items) (rng.bernoulli(p) ? first : second).pushBackSorted(g);
  return {std::move(first), std::move(second)};
}

bool meetsDeltaTarget(const Rational& value, int n, const Rational& e, const Rational& target) {
  if (target <= Rational(0)) return true;
  // value >= (1 - n^-e) target  <=>  n^-e >= y with y = 1 - value/target
  //                             <=>  y <= 0 or n^e <= 1/y
  const Rational y = Rational(1) - value / target;
  if (y <= Rational(0)) return true;
  return precise::powLeq(n, e, Rational(1) / y);
}

namespace {

void serveSingletons(const Bundle& c, std::span<const int> arrivals, int count,
                     std::vector<Grant>& out) {
  for (int t = 0; t < count; ++t) out.push_back({arrivals[t], Bundle{c.items()[t]}, FailureReason::none});
}

}  // namespace

UnknownDRun runUnknownD(const NormalizedInstance& instance, const UnknownParams& params,
                        std::span<const int> arrivals, std::uint64_t splitSeed,
                        const UnknownOptions& options) {
  const int n = instance.n();
  const int k = instance.k();
  if (static_cast<int>(arrivals.size()) != n) {
    throw InputError("expected " + std::to_string(n) + " arrivals, got " +
                     std::to_string(arrivals.size()));
  }
  UnknownDRun run;
  run.window = params.learnWindow(n);
  // delta <= 1/2 needs n > 10; smaller runs proceed but are marked
  if (n <= 10) run.report.flag("smallScale");
  std::vector<Grant> grants;

  if (run.window >= n) {
    run.branch = "degenerate";
    auto problem = AdversarialProblem::fromNormalized(instance);
    auto source = ArrivalSource::fixed({arrivals.begin(), arrivals.end()});
    AdversarialOptions adv;
    adv.checks = options.adversarialChecks;
    auto r = runAdversarialOn(problem, source, adv);
    grants = std::move(r.grants);
    run.violations = std::move(r.violations);
  } else {
    const int w = static_cast<int>(run.window);
    run.universal = universallyHighValued(instance, params.alpha);
    const int cSize = static_cast<int>(run.universal.size());
    const StochasticParams known{params.alpha, params.eta, params.epsilon};

    if (cSize >= w) {
      run.branch = "learnFromC";
      serveSingletons(run.universal, arrivals, w, grants);
      run.learned = learnDistribution(arrivals.first(w), k);
      std::vector<int> rest;
      for (int g = 0; g < instance.m(); ++g) {
        if (!std::binary_search(run.universal.begin(), run.universal.begin() + w, g)) {
          rest.push_back(g);
        }
      }
      auto out = dispatchKnownD(instance, Bundle(std::move(rest)), n - w, *run.learned, known,
                                arrivals.subspan(w), options.lowC);
      grants.insert(grants.end(), out.grants.begin(), out.grants.end());
      run.violations = std::move(out.violations);
      if (out.lowC) run.lowC = std::move(out.lowC);
    } else {
      const int served = std::min(cSize, n);
      serveSingletons(run.universal, arrivals, served, grants);
      const int remaining = n - served;
      if (remaining == 0) {
        run.branch = "singletons";
      } else {
        run.branch = "split";
        std::vector<int> rest;
        for (int g = 0; g < instance.m(); ++g) {
          if (!run.universal.contains(g)) rest.push_back(g);
        }
        const Bundle reduced(std::move(rest));
        run.splitProbability = Rational(2 * k) * Rational(w) / Rational(remaining);
        if (run.splitProbability > Rational(1)) {
          run.splitProbability = 1;
          run.report.flag("outOfRegime");
        }
        std::tie(run.b1, run.b2) = randomSplit(reduced, run.splitProbability, splitSeed);

        // Learning stage: the 1/k algorithm on B1, every share rescaled so a
        // type's proportional share of B1 among the learners is 1.
        run.learners = std::min(w, remaining);
        Instance scaled = instance.base;
        std::vector<bool> exempt(k, false);
        std::vector<Rational> b1Value(k);
        for (int i = 0; i < k; ++i) {
          b1Value[i] = value(instance.base.values(i), run.b1);
          auto& v = scaled.typeValues[i];
          if (b1Value[i].isZero()) {
            exempt[i] = true;
            continue;
          }
          const Rational factor = Rational(run.learners) / b1Value[i];
          for (const int g : run.b1) v[g] *= factor;
        }
        run.minB1Value = *std::min_element(b1Value.begin(), b1Value.end());
        run.splitConcentrated = meetsDeltaTarget(run.minB1Value, n, params.deltaExponent(),
                                                 Rational(2 * k) * Rational(w));
        AdversarialProblem problem{&scaled, run.b1, run.learners, exempt};
        auto source = ArrivalSource::fixed(
            {arrivals.begin() + served, arrivals.begin() + served + run.learners});
        AdversarialOptions adv;
        adv.checks = options.adversarialChecks;
        auto learning = runAdversarialOn(problem, source, adv);
        run.violations = std::move(learning.violations);
        for (const auto& g : learning.grants) {
          if (exempt[g.type] || value(scaled.values(g.type), g.bundle) >= Rational(1, k)) {
            ++run.learnersMeetingRestrictedShare;
          }
          grants.push_back(g);
        }
        run.learned = learnDistribution(arrivals.subspan(served, run.learners), k);

        const int later = remaining - run.learners;
        if (later > 0) {
          run.lowC = preprocessLowC(instance, run.b2, later, *run.learned, params.alpha,
                                    params.epsilon, options.lowC);
          auto tail = runLowC(*run.lowC, arrivals.subspan(served + run.learners),
                              options.lowC.tieBreakSeed);
          grants.insert(grants.end(), tail.begin(), tail.end());
          run.violations.insert(run.violations.end(), run.lowC->violations.begin(),
                                run.lowC->violations.end());
        }
      }
    }
  }

  auto flags = std::move(run.report.flags);
  auto [allocation, report] = assemble(instance, grants, params.alpha);
  run.allocation = std::move(allocation);
  run.report = std::move(report);
  for (auto& f : flags) run.report.flag(f);
  run.report.flag("branch:" + run.branch);
  if (run.branch == "degenerate") run.report.flag("degenerateScale");
  if (run.branch == "split") run.report.flag(run.splitConcentrated ? "splitConcentrated" : "splitDiluted");
  if (run.lowC) run.report.flag(run.lowC->allSaturated() ? "allSaturated" : "unsaturated");
  if (!run.violations.empty()) run.report.flag("invariantViolation");
  return run;
}

}  // namespace mmsonline
