// Acceptance suite: one [PASS]/[FAIL] line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mmsonline/adversarial.hpp"
#include "mmsonline/arrivals.hpp"
#include "mmsonline/genlab.hpp"
#include "mmsonline/harness.hpp"
#include "mmsonline/mms.hpp"
#include "mmsonline/rng.hpp"
#include "mmsonline/stochastic.hpp"
#include "mmsonline/unknown.hpp"

using namespace mmsonline;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Context {
  std::uint64_t seed = 2024;
  int parallelism = 1;
  // Reports produced by the Monte-Carlo suites, replayed by the determinism check.
  std::vector<std::pair<McConfig, std::string>> replay;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << x;
  return os.str();
}

Bundle allItems(int m) {
  std::vector<int> v(m);
  std::iota(v.begin(), v.end(), 0);
  return Bundle(std::move(v));
}

bool extraTrue(const TrialRecord& r, const std::string& key) {
  const auto it = r.extra.find(key);
  return it != r.extra.end() && it->second.is_boolean() && it->second.get<bool>();
}

AggregateReport runSuite(Context& ctx, McConfig cfg) {
  cfg.parallelism = ctx.parallelism;
  cfg.abortOnViolation = false;
  auto report = monteCarlo(cfg);
  ctx.replay.emplace_back(cfg, canonicalJson(report));
  return report;
}

// 1. exact solver against brute force
Outcome solverEquivalence(Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(deriveSeed(ctx.seed, 1, "instance"));
  int mismatches = 0;
  for (int t = 0; t < 500; ++t) {
    const int n = static_cast<int>(rng.between(1, 4));
    const int m = static_cast<int>(rng.between(1, 10));
    const auto inst = genRandom(n, m, 1, ValueModel::uniform(), rng.next());
    const auto v = inst.values(0);
    if (mmsExact(v, n).value != mmsBruteForce(v, n).value) ++mismatches;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {mismatches == 0 && secs < 60.0,
          "500 instances, " + std::to_string(mismatches) + " mismatches, " + fmt(secs, 2) + " s (limit 60 s)"};
}

// 2. witness bundles worth exactly 1 and total value exactly n after normalization
Outcome normalizationExactness(Context& ctx) {
  Rng rng(deriveSeed(ctx.seed, 2, "instance"));
  int bad = 0;
  int typesChecked = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = static_cast<int>(rng.between(1, 4));
    const int m = static_cast<int>(rng.between(n, 10));
    const int k = static_cast<int>(rng.between(1, 3));
    const auto ni = normalize(genRandom(n, m, k, ValueModel::uniform(), rng.next()), exactSolver());
    for (int i = 0; i < k; ++i) {
      if (ni.isZeroMms(i)) continue;
      ++typesChecked;
      const auto v = ni.base.values(i);
      bool ok = totalValue(v) == Rational(n) &&
                ni.witnessPartitions[i].size() == static_cast<std::size_t>(n);
      for (const auto& b : ni.witnessPartitions[i]) ok = ok && value(v, b) == Rational(1);
      if (!ok) ++bad;
    }
  }
  return {bad == 0 && typesChecked > 0,
          "200 instances, " + std::to_string(typesChecked) + " types, " + std::to_string(bad) + " inexact"};
}

// 3. exhaustive adversarial enumeration
Outcome adversarialGuarantee(Context& ctx) {
  int instances = 0;
  long sequences = 0;
  long failures = 0;
  long violations = 0;
  for (int k : {2, 3}) {
    for (int n : {3, 4, 5}) {
      int total = 1;
      for (int a = 0; a < n; ++a) total *= k;
      for (int t = 0; t < 100; ++t) {
        const std::uint64_t s = deriveSeed(ctx.seed, k * 1000 + n * 100 + t, "instance");
        const int m = static_cast<int>(Rng(s).between(n, 3 * n));
        McConfig cfg;
        cfg.algorithm = Algorithm::adversarial;
        cfg.instance = normalize(genRandom(n, m, k, ValueModel::uniform(), s), exactSolver());
        cfg.instanceLabel = "random k=" + std::to_string(k) + " n=" + std::to_string(n);
        cfg.exhaustive = true;
        cfg.trials = total;
        cfg.masterSeed = s;
        cfg.adversarialChecks = InvariantLevel::full;
        const auto agg = runSuite(ctx, cfg);
        ++instances;
        sequences += agg.trials;
        for (const auto& r : agg.records) {
          if (r.report.minRatio < Rational(1, k)) ++failures;
        }
        violations += agg.invariantViolations;
      }
    }
  }
  return {failures == 0 && violations == 0,
          std::to_string(instances) + " instances, " + std::to_string(sequences) + " sequences, " +
              std::to_string(failures) + " below 1/k, " + std::to_string(violations) + " invariant violations"};
}

// 4. adaptive adversary pushes the 1/k algorithm and greedy below 2/(sqrt(k)-2)
Outcome lowerBound(Context&) {
  std::string detail;
  bool pass = true;
  const std::vector<std::pair<std::string, PolicyFactory>> policies = {
      {"one-over-k", adversarialPolicy()}, {"greedy", greedyPolicy()}};
  for (int k : {16, 36}) {
    detail += " [bound " + std::string(k == 16 ? "1" : "1/2") + "]";
    for (int n : {4, 6}) {
      for (const auto& [name, policy] : policies) {
        const auto out = adaptiveLowerBoundAdversary(k, n, policy);
        const bool below = out.belowBound && belowSqrtBound(out.report.minRatio, k);
        pass = pass && below;
        detail += " k=" + std::to_string(k) + ",n=" + std::to_string(n) + "," + name + ":" +
                  out.report.minRatio.str() + (below ? "" : "(not below)");
      }
    }
  }
  return {pass, "min ratios" + detail};
}

// 5. known-distribution success on planted instances without universal items
Outcome knownDistribution(Context& ctx) {
  McConfig cfg;
  cfg.algorithm = Algorithm::knownD;
  cfg.generator = [](std::uint64_t seed) {
    PlantedOptions opts;
    opts.valueCap = {std::nullopt, Rational(1, 3), Rational(1, 3)};
    return genPlanted(200, 3, opts, seed);
  };
  cfg.instanceLabel = "planted n=200 k=3";
  cfg.hiddenDist = TypeDistribution::fromProbabilities({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  cfg.alpha = Rational(1, 3);
  cfg.eta = Rational(1, 2);
  cfg.epsilon = Rational(1, 10);
  cfg.trials = 1000;
  cfg.masterSeed = deriveSeed(ctx.seed, 5, "trial");
  const auto agg = runSuite(ctx, cfg);

  int successNotSaturated = 0;
  int conditional = 0;
  int conditionalFailures = 0;
  int withUniversal = 0;
  for (const auto& r : agg.records) {
    const bool saturated = extraTrue(r, "allSaturated");
    if (r.extra.at("universal").get<int>() != 0) ++withUniversal;
    if (r.report.succeededAtAlpha && !saturated) ++successNotSaturated;
    if (saturated && extraTrue(r, "withinCaps")) {
      ++conditional;
      if (!r.report.succeededAtAlpha) ++conditionalFailures;
    }
  }
  const double rate = static_cast<double>(agg.successes) / agg.trials;
  const bool pass = agg.successes * 100 >= agg.trials * 95 && successNotSaturated == 0 &&
                    conditionalFailures == 0 && withUniversal == 0 && agg.invariantViolations == 0;
  return {pass, "success " + fmt(rate) + " (need >= 0.95), successes without saturation " +
                    std::to_string(successNotSaturated) + ", conditional " +
                    std::to_string(conditional - conditionalFailures) + "/" + std::to_string(conditional) +
                    ", instances with universal items " + std::to_string(withUniversal)};
}

// 6. preprocessing on the 1/2-tightness instance
Outcome tightnessHalf(Context& ctx) {
  const auto ni = certifiedTightnessHalf(3, 30);
  const auto d = TypeDistribution::fromProbabilities({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  const int runs = 200;
  int highSaturated = 0;
  int lowSaturated = 0;
  for (int r = 0; r < runs; ++r) {
    LowCOptions opts;
    if (r > 0) opts.tieBreakSeed = deriveSeed(ctx.seed, r, "tiebreak");
    if (preprocessLowC(ni, allItems(ni.m()), 30, d, Rational(3, 5), Rational(1, 10), opts).allSaturated())
      ++highSaturated;
    if (preprocessLowC(ni, allItems(ni.m()), 30, d, Rational(1, 3), Rational(1, 10), opts).allSaturated())
      ++lowSaturated;
  }
  return {highSaturated == 0 && lowSaturated == runs,
          std::to_string(runs) + " runs, alpha=3/5 saturated " + std::to_string(highSaturated) +
              ", alpha=1/3 saturated " + std::to_string(lowSaturated)};
}

// 7. unknown-distribution pipeline
Outcome unknownDistribution(Context& ctx) {
  McConfig cfg;
  cfg.algorithm = Algorithm::unknownD;
  cfg.generator = [](std::uint64_t seed) {
    PlantedOptions opts;
    opts.valueCap = {std::nullopt, Rational(1, 3), Rational(1, 3)};
    return genPlanted(5000, 3, opts, seed);
  };
  cfg.instanceLabel = "planted n=5000 k=3";
  cfg.hiddenDist =
      TypeDistribution::fromProbabilities({Rational(1, 2), Rational(3, 10), Rational(1, 5)});
  cfg.c = Rational(1, 20);
  cfg.eta = Rational(1, 2);
  cfg.trials = 200;
  cfg.masterSeed = deriveSeed(ctx.seed, 7, "trial");
  const auto agg = runSuite(ctx, cfg);

  int learned = 0;
  int concentrated = 0;
  for (const auto& r : agg.records) {
    if (extraTrue(r, "learnedWithin1/20")) ++learned;
    if (extraTrue(r, "splitConcentrated")) ++concentrated;
  }
  const bool pass = learned * 100 >= agg.trials * 95 && concentrated * 100 >= agg.trials * 95 &&
                    agg.invariantViolations == 0;
  const auto frac = [&](int x) { return fmt(static_cast<double>(x) / agg.trials); };
  return {pass, "learned error <= 1/20 " + frac(learned) + " (need >= 0.95), split concentrated " +
                    frac(concentrated) + " (need >= 0.95), end-to-end success " + frac(agg.successes) +
                    " (target 0.90, informative)"};
}

// 8. learning-augmented degradation
Outcome learningAugmented(Context& ctx) {
  int trials = 0;
  int degradationFailures = 0;
  int bracketFailures = 0;
  int checkedSuccesses = 0;
  const Rational beta(6, 5);
  for (const auto algo : {Algorithm::adversarial, Algorithm::knownD, Algorithm::unknownD}) {
    McConfig cfg;
    cfg.algorithm = algo;
    cfg.generator = [](std::uint64_t seed) {
      Rng rng(seed);
      const int n = static_cast<int>(rng.between(2, 4));
      const int m = static_cast<int>(rng.between(n, 10));
      const int k = static_cast<int>(rng.between(2, 3));
      return normalize(genRandom(n, m, k, ValueModel::uniform(), rng.next()), exactSolver());
    };
    cfg.instanceLabel = "random small";
    cfg.perturbBeta = beta;
    cfg.trials = 100;
    cfg.masterSeed = deriveSeed(ctx.seed, 8, toString(algo));
    const auto agg = runSuite(ctx, cfg);
    for (const auto& r : agg.records) {
      ++trials;
      if (!r.mmsBracketHolds || !*r.mmsBracketHolds) ++bracketFailures;
      if (!r.degradationHolds || !*r.degradationHolds) ++degradationFailures;
      if (r.report.succeededAtAlpha) {
        ++checkedSuccesses;
        if (!r.trueMinRatio || *r.trueMinRatio < r.alpha / (beta * beta)) ++degradationFailures;
      }
    }
  }
  return {degradationFailures == 0 && bracketFailures == 0,
          std::to_string(trials) + " trials, " + std::to_string(checkedSuccesses) +
              " perturbed successes checked, " + std::to_string(degradationFailures) +
              " below alpha/beta^2, " + std::to_string(bracketFailures) + " MMS bracket failures"};
}

// 9. byte-identical reports across parallelism levels
Outcome determinism(Context& ctx) {
  if (ctx.replay.empty()) {
    // Standalone run: produce the reports of the cheaper suites first.
    adversarialGuarantee(ctx);
    learningAugmented(ctx);
  }
  const int other = ctx.parallelism == 1 ? std::max(2u, std::thread::hardware_concurrency()) : 1;
  int mismatches = 0;
  for (auto& [cfg, text] : ctx.replay) {
    McConfig again = cfg;
    again.parallelism = other;
    if (canonicalJson(monteCarlo(again)) != text) ++mismatches;
    again.parallelism = cfg.parallelism;
    if (canonicalJson(monteCarlo(again)) != text) ++mismatches;
  }
  return {mismatches == 0 && !ctx.replay.empty(),
          std::to_string(ctx.replay.size()) + " suite reports replayed at parallelism " +
              std::to_string(ctx.parallelism) + " and " + std::to_string(other) + ", " +
              std::to_string(mismatches) + " mismatches"};
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome(Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::vector<int> only;
  Context ctx;
  ctx.parallelism = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--criterion", only, "run only these criteria (1-9)")->check(CLI::Range(1, 9));
  app.add_option("--seed", ctx.seed, "master seed");
  app.add_option("--parallelism", ctx.parallelism, "worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "solver oracle equivalence", solverEquivalence},
      {2, "normalization exactness", normalizationExactness},
      {3, "adversarial 1/k guarantee, exhaustive", adversarialGuarantee},
      {4, "lower-bound adversary below 2/(sqrt(k)-2)", lowerBound},
      {5, "known-distribution success", knownDistribution},
      {6, "tightness of alpha = 1/2", tightnessHalf},
      {7, "unknown-distribution pipeline", unknownDistribution},
      {8, "learning-augmented degradation", learningAugmented},
      {9, "determinism across parallelism", determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run(ctx);
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::printf("[%s] %d %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
