#include <random>

#include "doctest.h"
#include "mmsonline/core.hpp"
#include "mmsonline/genlab.hpp"
#include "mmsonline/mms.hpp"
#include "oracles.hpp"

using namespace mmsonline;

namespace {

Instance single(int n, std::vector<Rational> values) {
  Instance inst;
  inst.nAgents = n;
  inst.mItems = static_cast<int>(values.size());
  inst.typeValues = {std::move(values)};
  return inst;
}

Allocation alloc(std::vector<AllocationEntry> entries) { return Allocation{std::move(entries)}; }

}  // namespace

TEST_CASE("rational canonical form") {
  const Rational r(6, -8);
  CHECK(r.num() == -3);
  CHECK(r.den() == 4);
  CHECK(Rational(0, 5) == Rational(0));
  CHECK(Rational(0, 5).den() == 1);
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("rational parse") {
  CHECK(Rational::parse("3/9") == Rational(1, 3));
  CHECK(Rational::parse("0.05") == Rational(1, 20));
  CHECK(Rational::parse("-1.5") == Rational(-3, 2));
  CHECK(Rational::parse("7") == Rational(7));
  CHECK_THROWS(Rational::parse("x/2"));
  CHECK_THROWS(Rational::parse(""));
}

TEST_CASE("rational arithmetic is exact and ordering matches cross-multiplication") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(-1000, 1000);
  std::uniform_int_distribution<int> den(1, 1000);
  for (int i = 0; i < 5000; ++i) {
    const std::int64_t an = num(rng), ad = den(rng), bn = num(rng), bd = den(rng);
    const Rational a(an, ad);
    const Rational b(bn, bd);
    CHECK((a + b) - b == a);
    CHECK((a * b) + a == a * (b + Rational(1)));
    if (!b.isZero()) CHECK((a / b) * b == a);
    const __int128 lhs = static_cast<__int128>(an) * bd;
    const __int128 rhs = static_cast<__int128>(bn) * ad;
    CHECK((a < b) == (lhs < rhs));
    CHECK((a == b) == (lhs == rhs));
  }
}

TEST_CASE("rational overflow throws instead of wrapping") {
  const Rational big(std::int64_t{1} << 62);
  CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("value examples") {
  const std::vector<Rational> ones(4, Rational(1));
  CHECK(value(ones, Bundle{}) == Rational(0));
  const std::vector<Rational> v{Rational(1, 2), Rational(1, 3)};
  CHECK(value(v, Bundle{0, 1}) == Rational(5, 6));
  // all-ones valuation, m = 4, bundle of ceil(alpha m / 2) = 2 items
  CHECK(value(ones, Bundle{0, 1}) == Rational(2));
  CHECK_THROWS_AS(value(v, Bundle{2}), InputError);
}

TEST_CASE("bundle rejects duplicates") {
  CHECK_THROWS_AS(Bundle(std::vector<int>{1, 1}), InputError);
  CHECK(Bundle(std::vector<int>{3, 1, 2}).items() == std::vector<int>{1, 2, 3});
}

TEST_CASE("instance validation") {
  Instance bad = single(2, {Rational(1), Rational(-1)});
  CHECK_THROWS_AS(bad.validate(), InputError);
  Instance ragged = single(2, {Rational(1), Rational(1)});
  ragged.typeValues.push_back({Rational(1)});
  CHECK_THROWS_AS(ragged.validate(), InputError);
}

TEST_CASE("normalize examples") {
  SUBCASE("symmetric") {
    auto ni = normalize(single(2, {2, 2, 2, 2}), exactSolver());
    for (const auto& x : ni.base.typeValues[0]) CHECK(x == Rational(1, 2));
    CHECK(totalValue(ni.base.values(0)) == Rational(2));
    CHECK(ni.originalMms[0] == Rational(4));
  }
  SUBCASE("one heavy item") {
    auto ni = normalize(single(2, {3, 1, 1, 1}), exactSolver());
    CHECK(oracle::mms({3, 1, 1, 1}, 2) == Rational(3));
    CHECK(ni.originalMms[0] == Rational(3));
    const auto& v = ni.base.typeValues[0];
    CHECK(v[0] == Rational(1));
    CHECK(v[1] == Rational(1, 3));
    CHECK(v[2] == Rational(1, 3));
    CHECK(v[3] == Rational(1, 3));
  }
  SUBCASE("zero valuation") {
    auto ni = normalize(single(3, {0, 0}), exactSolver());
    CHECK(ni.isZeroMms(0));
    CHECK(ni.base.typeValues[0] == std::vector<Rational>{0, 0});
    CHECK(ni.normalizedMms(0) == Rational(0));
  }
}

TEST_CASE("normalized instances: witness bundles worth 1, total n, items at most 1") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = n + static_cast<int>(rng() % 6);
    const int k = 1 + static_cast<int>(rng() % 3);
    Instance inst;
    inst.nAgents = n;
    inst.mItems = m;
    for (int i = 0; i < k; ++i) inst.typeValues.push_back(oracle::randomValues(rng, m));
    const auto ni = normalize(inst, exactSolver());
    for (int i = 0; i < k; ++i) {
      CHECK(ni.originalMms[i] == oracle::mms(inst.typeValues[i], n));
      if (ni.isZeroMms(i)) continue;
      REQUIRE(ni.witnessPartitions[i].size() == static_cast<std::size_t>(n));
      for (const auto& b : ni.witnessPartitions[i]) CHECK(value(ni.base.values(i), b) == Rational(1));
      CHECK(totalValue(ni.base.values(i)) == Rational(n));
      for (const auto& x : ni.base.typeValues[i]) CHECK(x <= Rational(1));
      // rescaling soundness: v(b) >= v'(b) * MMS on random bundles
      for (int rep = 0; rep < 10; ++rep) {
        std::vector<int> items;
        for (int g = 0; g < m; ++g) {
          if (rng() % 2) items.push_back(g);
        }
        const Bundle b(items);
        CHECK(value(inst.values(i), b) >= value(ni.base.values(i), b) * ni.originalMms[i]);
      }
    }
  }
}

TEST_CASE("fromCertified rejects witnesses that are not worth exactly 1") {
  Instance inst = single(2, {Rational(1, 2), Rational(1, 2), Rational(1)});
  CHECK_NOTHROW(NormalizedInstance::fromCertified(inst, {{Bundle{0, 1}, Bundle{2}}}));
  CHECK_THROWS_AS(NormalizedInstance::fromCertified(inst, {{Bundle{0}, Bundle{1, 2}}}), InputError);
}

TEST_CASE("universallyHighValued examples") {
  Instance inst;
  inst.nAgents = 1;
  inst.mItems = 2;
  inst.typeValues = {{Rational(3, 5), Rational(2, 5)}, {Rational(7, 10), Rational(9, 10)}};
  // the stated values are used as already-normalized thresholds
  NormalizedInstance ni;
  ni.base = inst;
  ni.original = inst;
  ni.zeroMms = {false, false};
  CHECK(universallyHighValued(ni, Rational(1, 2)).items() == std::vector<int>{0});
  CHECK(universallyHighValued(ni, Rational(0)).items() == std::vector<int>{0, 1});

  const auto adv = normalize(genAdvCounterexample(4, Rational(1, 32)), exactSolver());
  CHECK(universallyHighValued(adv, Rational(1, 2)).empty());
}

TEST_CASE("verifyAllocation") {
  const auto ni = normalize(single(2, {1, 1, 1, 1}), exactSolver());
  SUBCASE("boundary ratio equals alpha succeeds") {
    // items are worth 1/2 each after normalization
    const auto r = verifyAllocation(ni, alloc({{0, 0, Bundle{0}}}), Rational(1, 2));
    CHECK(r.succeededAtAlpha);
    CHECK(r.minRatio == Rational(1, 2));
  }
  SUBCASE("empty bundle fails with valueBelowAlpha") {
    const auto r = verifyAllocation(ni, alloc({{0, 0, Bundle{}}}), Rational(1, 2));
    CHECK_FALSE(r.succeededAtAlpha);
    CHECK((r.failureReason == FailureReason::valueBelowAlpha));
    CHECK(r.minRatio == Rational(0));
  }
  SUBCASE("overlap is a validation error") {
    CHECK_THROWS_AS(verifyAllocation(ni, alloc({{0, 0, Bundle{0, 1}}, {1, 0, Bundle{1}}}), 1),
                    ValidationError);
  }
  SUBCASE("monotone in alpha") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<int> a, b;
      for (int g = 0; g < 4; ++g) {
        const auto r = rng() % 3;
        if (r == 0) a.push_back(g);
        if (r == 1) b.push_back(g);
      }
      const auto allocation = alloc({{0, 0, Bundle(a)}, {1, 0, Bundle(b)}});
      for (int x = 0; x <= 4; ++x) {
        const Rational alpha(x, 4);
        if (!verifyAllocation(ni, allocation, alpha).succeededAtAlpha) continue;
        for (int y = 0; y <= x; ++y) {
          CHECK(verifyAllocation(ni, allocation, Rational(y, 4)).succeededAtAlpha);
        }
      }
    }
  }
}

TEST_CASE("Example 1.1 trace: the second agent values her bundle at 0") {
  const auto ex = genExample1(4);
  const Bundle first{0, 1};
  const auto ni = normalize(ex.withSecondType(first), exactSolver());
  const auto r = verifyAllocation(ni, alloc({{0, 0, first}, {1, 1, Bundle{2, 3}}}), Rational(1, 2));
  CHECK(r.minRatio == Rational(0));
  CHECK(r.perAgentRatio[0] == Rational(1));
}

TEST_CASE("type distribution sorting keeps the permutation") {
  const auto d = TypeDistribution::fromProbabilities({Rational(1, 5), Rational(1, 2), Rational(3, 10)});
  CHECK(d.sortedProbs() == std::vector<Rational>{Rational(1, 2), Rational(3, 10), Rational(1, 5)});
  CHECK(d.permutationToOriginal() == std::vector<int>{1, 2, 0});
  CHECK(d.rankOf(0) == 2);
  CHECK(d.probOf(0) == Rational(1, 5));
  CHECK(d.byOriginalType() == std::vector<Rational>{Rational(1, 5), Rational(1, 2), Rational(3, 10)});
  CHECK_THROWS_AS(TypeDistribution::fromProbabilities({Rational(1, 2)}), InputError);
  CHECK_THROWS_AS(TypeDistribution::fromProbabilities({Rational(3, 2), Rational(-1, 2)}), InputError);
}

TEST_CASE("failure reasons round-trip through strings") {
  for (auto r : {FailureReason::none, FailureReason::emptyReserve, FailureReason::poolExhausted,
                 FailureReason::valueBelowAlpha}) {
    CHECK((failureReasonFromString(toString(r)) == r));
  }
}
