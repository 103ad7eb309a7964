#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "mmsonline/arrivals.hpp"
#include "mmsonline/genlab.hpp"
#include "mmsonline/stochastic.hpp"
#include "oracles.hpp"

using namespace mmsonline;

namespace {

Bundle allItems(int m) {
  std::vector<int> v(m);
  std::iota(v.begin(), v.end(), 0);
  return Bundle(std::move(v));
}

/// High items valued 1/2, the rest 1/4; witness j = {high_j, two lows}.
std::pair<Valuation, std::vector<Bundle>> halfQuarter(int m, const std::vector<int>& high) {
  Valuation v(m, Rational(1, 4));
  std::vector<int> low;
  for (int g = 0; g < m; ++g) {
    if (std::find(high.begin(), high.end(), g) != high.end()) {
      v[g] = Rational(1, 2);
    } else {
      low.push_back(g);
    }
  }
  std::vector<Bundle> w;
  for (std::size_t j = 0; j < high.size(); ++j) {
    w.push_back(Bundle(std::vector<int>{high[j], low[2 * j], low[2 * j + 1]}));
  }
  return {v, w};
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int g = lo; g < hi; ++g) v.push_back(g);
  return v;
}

NormalizedInstance orderingInstance(const std::vector<std::vector<int>>& highs) {
  Instance inst;
  inst.nAgents = 10;
  inst.mItems = 30;
  std::vector<std::vector<Bundle>> witnesses;
  for (const auto& h : highs) {
    auto [v, w] = halfQuarter(30, h);
    inst.typeValues.push_back(v);
    witnesses.push_back(w);
  }
  return NormalizedInstance::fromCertified(inst, witnesses);
}

}  // namespace

TEST_CASE("alpha from eta") {
  CHECK(StochasticParams::alphaForEta(Rational(1, 2)) == Rational(1, 3));
  CHECK(StochasticParams::fromEta(Rational(0), Rational(1, 10)).alpha == Rational(1, 2));
}

TEST_CASE("saturation cap example and floating-point oracle") {
  CHECK(saturationCap(100, Rational(1, 4), Rational(3, 10)) == 44);
  CHECK(saturationCap(200, Rational(1, 3), Rational(1, 10)) == 80);
  int compared = 0;
  for (int n = 5; n <= 600; n += 13) {
    for (const Rational p : {Rational(1, 2), Rational(1, 3), Rational(1, 5), Rational(3, 10),
                             Rational(1, 7), Rational(0)}) {
      for (const Rational e : {Rational(1, 10), Rational(1, 5), Rational(3, 10), Rational(2, 5)}) {
        const long double mu = n * oracle::toLd(p);
        const auto expect =
            oracle::safeFloor(mu + std::pow(static_cast<long double>(n), oracle::toLd(e)) * std::sqrt(mu));
        if (!expect) continue;
        ++compared;
        CHECK(saturationCap(n, p, e) == *expect);
        CHECK(saturationCap(n, p, e) >= static_cast<std::int64_t>(std::floor(mu)));
      }
    }
  }
  CHECK(compared > 500);
}

TEST_CASE("slack bracket contains z") {
  const std::vector<Rational> probs{Rational(1, 2), Rational(3, 10), Rational(1, 5)};
  for (int n : {10, 100, 1000, 5000}) {
    const auto b = slackBracket(n, probs, Rational(1, 10));
    long double z = 0;
    for (const auto& p : probs) z += std::sqrt(n * oracle::toLd(p));
    z *= std::pow(static_cast<long double>(n), 0.1L);
    CHECK(oracle::toLd(b.lo) <= z + 1e-9L);
    CHECK(oracle::toLd(b.hi) >= z - 1e-9L);
    CHECK(oracle::toLd(b.hi - b.lo) < 1e-4L);
  }
}

TEST_CASE("high-C condition matches the floating-point oracle away from ties") {
  int compared = 0;
  for (int n = 4; n <= 400; n += 11) {
    for (int k = 2; k <= 4; ++k) {
      for (int c = 0; c <= n; c += 3) {
        const Rational p1(1, 2);
        const long double rhs = n * (1.0L - 1.0L / k) +
                                std::pow(static_cast<long double>(n), 0.1L) * std::sqrt(n * 0.5L);
        if (std::fabs(c - rhs) < 1e-9L) continue;
        ++compared;
        CHECK(highCCondition(c, n, k, p1, Rational(1, 10)) == (c >= rhs));
      }
    }
  }
  CHECK(compared > 1000);
}

TEST_CASE("ordering: first qualifying pair puts i first and j last") {
  SUBCASE("two types") {
    const auto ni = orderingInstance({range(0, 10), range(5, 15)});
    const auto d = TypeDistribution::fromProbabilities({Rational(1, 2), Rational(1, 2)});
    const auto s = preprocessLowC(ni, allItems(30), 10, d, Rational(1, 3), Rational(1, 10));
    CHECK(s.highValueSets[0].items() == range(0, 10));
    CHECK(s.highValueSets[1].items() == range(5, 15));
    CHECK(s.ordering == std::vector<int>{0, 1});
  }
  SUBCASE("three types, the pair reorders the natural order") {
    const auto ni = orderingInstance({range(0, 10), range(5, 15), range(0, 10)});
    const auto d =
        TypeDistribution::fromProbabilities({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
    const auto s = preprocessLowC(ni, allItems(30), 10, d, Rational(1, 3), Rational(1, 10));
    CHECK(s.ordering == std::vector<int>{0, 2, 1});
  }
  SUBCASE("identical high sets keep the natural order") {
    const auto ni = orderingInstance({range(0, 10), range(0, 10)});
    const auto d = TypeDistribution::fromProbabilities({Rational(1, 2), Rational(1, 2)});
    const auto s = preprocessLowC(ni, allItems(30), 10, d, Rational(1, 3), Rational(1, 10));
    CHECK(s.ordering == std::vector<int>{0, 1});
  }
}

TEST_CASE("no high-value items: pure bag filling") {
  PlantedOptions opts;
  opts.valueCap = {Rational(1, 3), Rational(1, 3)};
  const auto ni = genPlanted(20, 2, opts, 4);
  const auto d = TypeDistribution::fromProbabilities({Rational(1, 2), Rational(1, 2)});
  const auto s = preprocessLowC(ni, allItems(ni.m()), 20, d, Rational(1, 3), Rational(1, 10));
  for (const auto& t : s.highValueSets) CHECK(t.empty());
  CHECK(s.singletonCount == std::vector<int>{0, 0});
  CHECK(s.bagCount > 0);
  CHECK(s.violations.empty());
}

namespace {

void checkLowCInvariants(const NormalizedInstance& ni, const LowCState& s, const Rational& alpha) {
  CHECK(s.violations.empty());
  std::vector<int> owner(ni.m(), -1);
  for (int r = 0; r < s.k(); ++r) {
    const auto v = ni.base.values(s.distribution.originalOfRank(r));
    CHECK(static_cast<std::int64_t>(s.reserves[r].size()) <= s.caps[r]);
    for (const auto& b : s.reserves[r]) {
      CHECK(value(v, b) >= alpha);
      for (int g : b) {
        CHECK(owner[g] == -1);
        owner[g] = r;
      }
    }
  }
  for (int r = 0; r < s.k(); ++r) {
    if (s.saturatedAfterTurns[r]) continue;
    // an unsaturated type has used up every high item it could reach
    for (int g : s.highValueSets[r]) CHECK(owner[g] != -1);
  }
  for (int r = 0; r < s.k(); ++r) {
    if (s.saturated[r]) continue;
    const auto v = ni.base.values(s.distribution.originalOfRank(r));
    CHECK(value(v, s.leftover) < alpha);
  }
}

}  // namespace

TEST_CASE("low-C preprocessing invariants on planted instances") {
  const Rational alpha(1, 3);
  const std::vector<std::vector<Rational>> dists{
      {Rational(1, 2), Rational(3, 10), Rational(1, 5)},
      {Rational(1, 3), Rational(1, 3), Rational(1, 3)},
      {Rational(7, 10), Rational(1, 5), Rational(1, 10)}};
  int saturatedRuns = 0;
  int conditionalChecks = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    PlantedOptions opts;
    if (seed % 2 == 0) opts.valueCap = {std::nullopt, Rational(1, 3), Rational(1, 3)};
    const auto ni = genPlanted(60, 3, opts, seed);
    for (const auto& probs : dists) {
      const auto d = TypeDistribution::fromProbabilities(probs);
      for (const std::optional<std::uint64_t> tb : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{seed}}) {
        LowCOptions lo;
        lo.tieBreakSeed = tb;
        const auto s = preprocessLowC(ni, allItems(ni.m()), 60, d, alpha, Rational(1, 10), lo);
        checkLowCInvariants(ni, s, alpha);
        if (s.allSaturated()) ++saturatedRuns;

        // conditional success: all saturated and X_i <= M_i implies success
        const auto arrivals = sampleArrivals(d, 60, seed * 31 + 7);
        const auto run = runKnownD(ni, d, {alpha, Rational(1, 2), Rational(1, 10)}, arrivals, lo);
        if (run.outcome.lowC && run.outcome.lowC->allSaturated()) {
          const auto& st = *run.outcome.lowC;
          std::vector<std::int64_t> x(3, 0);
          const int offset = ni.n() - st.nPrime;
          for (int a = offset; a < ni.n(); ++a) ++x[d.rankOf(arrivals[a])];
          bool within = true;
          for (int r = 0; r < 3; ++r) within = within && x[r] <= st.caps[r];
          if (within) {
            ++conditionalChecks;
            CHECK(run.report.succeededAtAlpha);
          }
        }
      }
    }
  }
  CHECK(saturatedRuns > 0);
  CHECK(conditionalChecks > 0);
}

TEST_CASE("runLowC: one type with n reserves serves every sequence") {
  const auto ni = certifiedTightnessHalf(1, 6);
  const auto d = TypeDistribution::fromProbabilities({Rational(1)});
  auto s = preprocessLowC(ni, allItems(12), 6, d, Rational(1, 2), Rational(1, 10));
  CHECK(s.allSaturated());
  const auto grants = runLowC(s, std::vector<int>(6, 0));
  for (const auto& g : grants) CHECK((g.failure == FailureReason::none));
}

TEST_CASE("tightness of 1/2: alpha = 3/5 cannot saturate, alpha = 1/3 can") {
  const auto ni = certifiedTightnessHalf(3, 9);
  const auto d = TypeDistribution::fromProbabilities({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  const auto high = preprocessLowC(ni, allItems(18), 9, d, Rational(3, 5), Rational(1, 10));
  CHECK_FALSE(high.allSaturated());
  std::int64_t capSum = 0;
  for (auto c : high.caps) capSum += c;
  CHECK(capSum > 9);
  CHECK(high.bagCount <= 9);
  const auto low = preprocessLowC(ni, allItems(18), 9, d, Rational(1, 3), Rational(1, 10));
  CHECK(low.allSaturated());
}

namespace {

/// n = 4, two types with one shared valuation: items 0, 1 worth 1; items 2..9 worth 1/4.
NormalizedInstance highCInstance() {
  Instance inst;
  inst.nAgents = 4;
  inst.mItems = 10;
  Valuation v(10, Rational(1, 4));
  v[0] = v[1] = 1;
  inst.typeValues = {v, v};
  const std::vector<Bundle> w{Bundle{0}, Bundle{1}, Bundle{2, 3, 4, 5}, Bundle{6, 7, 8, 9}};
  return NormalizedInstance::fromCertified(inst, {w, w});
}

}  // namespace

TEST_CASE("high-C preprocessing and service") {
  const auto ni = highCInstance();
  const auto d = TypeDistribution::fromProbabilities({Rational(2, 3), Rational(1, 3)});
  SUBCASE("|N| - |C| type-one arrivals drain G_1, then A covers the rest") {
    auto s = preprocessHighC(ni, allItems(10), 4, d, Rational(1, 3));
    CHECK(s.cSize == 2);
    CHECK(s.shared.size() == 2u);
    CHECK(s.typeOneReserve.size() == 2u);
    const auto grants = runHighC(s, d, std::vector<int>{0, 0, 1, 1});
    for (const auto& g : grants) CHECK((g.failure == FailureReason::none));
    CHECK(grants[0].bundle == (Bundle{2, 3, 4, 5}));
    CHECK(grants[2].bundle == Bundle{0});
    CHECK(s.typeOneReserve.empty());
    CHECK(s.shared.empty());
  }
  SUBCASE("too few type-one arrivals: a failure is recorded") {
    auto s = preprocessHighC(ni, allItems(10), 4, d, Rational(1, 3));
    const auto grants = runHighC(s, d, std::vector<int>{1, 1, 1, 0});
    CHECK((grants[2].failure == FailureReason::emptyReserve));
    CHECK((grants[3].failure == FailureReason::none));
  }
  SUBCASE("|C| >= |N| leaves G_1 empty") {
    Instance inst;
    inst.nAgents = 4;
    inst.mItems = 4;
    inst.typeValues = {Valuation(4, 1), Valuation(4, 1)};
    const auto all = certifiedUnitInstance(inst);
    auto s = preprocessHighC(all, allItems(4), 4, d, Rational(1, 3));
    CHECK(s.typeOneReserve.empty());
    CHECK(s.shared.size() == 4u);
    for (const auto& g : runHighC(s, d, std::vector<int>{1, 0, 1, 0})) {
      CHECK(g.bundle.size() == 1u);
      CHECK((g.failure == FailureReason::none));
    }
  }
}

TEST_CASE("restricted witness keeps untouched bundles and merges the rest") {
  const auto ni = highCInstance();
  // witness {0} {1} {2..5} {6..9}; dropping item 1 breaks one bundle
  const auto parts = restrictedWitness(ni, 0, Bundle{0, 2, 3, 4, 5, 6, 7, 8, 9}, 2);
  REQUIRE(parts.size() == 2u);
  CHECK(parts[0] == Bundle{0});
  CHECK(parts[1] == (Bundle{2, 3, 4, 5, 6, 7, 8, 9}));
  const auto three = restrictedWitness(ni, 0, Bundle{0, 1, 2, 3, 4, 5, 6, 7}, 3);
  CHECK(three[2] == (Bundle{2, 3, 4, 5, 6, 7}));
  CHECK_THROWS_AS(restrictedWitness(ni, 0, Bundle{2, 3}, 2), InputError);
}

TEST_CASE("dispatch") {
  const Rational alpha(1, 3);
  const StochasticParams params{alpha, Rational(1, 2), Rational(1, 10)};
  SUBCASE("|C| = n: every agent gets a universal singleton") {
    Instance inst;
    inst.nAgents = 5;
    inst.mItems = 5;
    inst.typeValues = {Valuation(5, 1), Valuation(5, 1)};
    const auto ni = certifiedUnitInstance(inst);
    const auto d = TypeDistribution::fromProbabilities({Rational(1, 2), Rational(1, 2)});
    const auto run = runKnownD(ni, d, params, std::vector<int>{0, 1, 1, 0, 1});
    CHECK(run.report.succeededAtAlpha);
    CHECK(run.report.minRatio >= alpha);
    for (const auto& e : run.allocation.entries) CHECK(e.bundle.size() == 1u);
  }
  SUBCASE("|C| = 0: straight to low-C") {
    PlantedOptions opts;
    opts.valueCap = {Rational(1, 3), Rational(1, 3)};
    const auto ni = genPlanted(30, 2, opts, 9);
    const auto d = TypeDistribution::fromProbabilities({Rational(1, 2), Rational(1, 2)});
    const auto run = runKnownD(ni, d, params, sampleArrivals(d, 30, 1));
    CHECK(run.outcome.path == "lowC");
    CHECK(run.outcome.universal.empty());
    REQUIRE(run.outcome.lowC);
    CHECK(run.outcome.lowC->nPrime == 30);
  }
  SUBCASE("p_k tightness instance reduces to n' = n/k") {
    const auto t = genTightnessPk(4, 20, Rational(1, 10));
    const auto ni = certifiedUnitInstance(t.instance);
    const auto run = runKnownD(ni, t.distribution, params, sampleArrivals(t.distribution, 20, 3));
    CHECK(run.outcome.universal.size() == 15u);
    CHECK(run.outcome.path == "lowC");
    REQUIRE(run.outcome.lowC);
    CHECK(run.outcome.lowC->nPrime == 5);
  }
}

TEST_CASE("assemble: recorded failure wins over value checks") {
  const auto ni = highCInstance();
  std::vector<Grant> grants{{0, Bundle{0}, FailureReason::none}, {1, {}, FailureReason::emptyReserve}};
  const auto [alloc, report] = assemble(ni, grants, Rational(1, 3));
  CHECK(alloc.entries.size() == 2u);
  CHECK((report.failureReason == FailureReason::emptyReserve));
  CHECK_FALSE(report.succeededAtAlpha);
}
