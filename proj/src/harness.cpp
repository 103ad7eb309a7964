#include "mmsonline/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "mmsonline/arrivals.hpp"
#include "mmsonline/instance_io.hpp"
#include "mmsonline/rng.hpp"

namespace mmsonline {

using nlohmann::json;

std::string_view toString(Algorithm a) {
  switch (a) {
    case Algorithm::adversarial: return "adversarial";
    case Algorithm::knownD: return "known-d";
    case Algorithm::unknownD: return "unknown-d";
  }
  return "?";
}

Algorithm algorithmFromString(std::string_view text) {
  if (text == "adversarial") return Algorithm::adversarial;
  if (text == "known-d" || text == "knownD") return Algorithm::knownD;
  if (text == "unknown-d" || text == "unknownD") return Algorithm::unknownD;
  throw InputError("unknown algorithm \"" + std::string(text) + "\"");
}

Instance perturb(const Instance& instance, const Rational& beta, std::uint64_t seed) {
  if (beta < Rational(1)) throw InputError("beta must be at least 1");
  constexpr std::int64_t grid = 120;
  const Rational scaledLo = Rational(grid) / beta;
  const Rational scaledHi = Rational(grid) * beta;
  const std::int64_t lo = scaledLo.num() / scaledLo.den() + (scaledLo.isInteger() ? 0 : 1);
  const std::int64_t hi = scaledHi.num() / scaledHi.den();
  Rng rng(seed);
  Instance out = instance;
  for (auto& v : out.typeValues) {
    for (auto& x : v) x *= Rational(rng.between(lo, hi), grid);
  }
  return out;
}

namespace {

TypeDistribution uniformOver(int k) {
  return TypeDistribution::fromProbabilities(std::vector<Rational>(k, Rational(1, k)));
}

std::vector<int> lexicographicSequence(std::int64_t index, int k, int n) {
  std::vector<int> seq(n);
  for (int pos = n - 1; pos >= 0; --pos) {
    seq[pos] = static_cast<int>(index % k);
    index /= k;
  }
  if (index != 0) throw InputError("exhaustive trial index exceeds k^n");
  return seq;
}

Rational maxAbsError(const TypeDistribution& learned, const TypeDistribution& truth) {
  const auto a = learned.byOriginalType();
  const auto b = truth.byOriginalType();
  Rational worst(0);
  for (std::size_t i = 0; i < a.size(); ++i) worst = max(worst, abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TrialRecord runTrial(const McConfig& config, int trial) {
  const auto t = static_cast<std::uint64_t>(trial);
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = deriveSeed(config.masterSeed, t, "trial");
  rec.algorithm = config.algorithm;

  NormalizedInstance generated;
  const NormalizedInstance* truth = nullptr;
  if (config.instance) {
    truth = &*config.instance;
  } else {
    if (!config.generator) throw InputError("monte carlo needs an instance or a generator");
    generated = config.generator(deriveSeed(config.masterSeed, t, "instance"));
    truth = &generated;
  }
  NormalizedInstance perturbed;
  const NormalizedInstance* seen = truth;
  if (config.perturbBeta) {
    perturbed = normalize(perturb(truth->original, *config.perturbBeta,
                                  deriveSeed(config.masterSeed, t, "perturb")),
                          exactSolver(config.solver));
    seen = &perturbed;
  }
  const int n = seen->n();
  const int k = seen->k();
  rec.n = n;
  rec.m = seen->m();
  rec.k = k;
  const TypeDistribution dist = config.hiddenDist ? *config.hiddenDist : uniformOver(k);
  if (dist.k() != k) throw InputError("distribution and instance disagree on k");
  rec.alpha = config.alpha ? *config.alpha
              : config.algorithm == Algorithm::adversarial ? Rational(1, k)
                                                           : StochasticParams::alphaForEta(config.eta);
  if (config.algorithm == Algorithm::adversarial && config.exhaustive) {
    rec.arrivals = lexicographicSequence(trial, k, n);
  } else {
    rec.arrivals = sampleArrivals(dist, n, deriveSeed(config.masterSeed, t, "arrivals"));
  }
  std::optional<std::uint64_t> tieBreak;
  if (config.randomTieBreak) tieBreak = deriveSeed(config.masterSeed, t, "tiebreak");

  Allocation allocation;
  switch (config.algorithm) {
    case Algorithm::adversarial: {
      AdversarialOptions opts;
      opts.checks = config.adversarialChecks;
      opts.tieBreakSeed = tieBreak;
      auto source = ArrivalSource::fixed(rec.arrivals);
      auto run = runAdversarial(*seen, source, opts);
      allocation = std::move(run.allocation);
      TrialReport report = verifyAllocation(*seen, allocation, rec.alpha);
      if (run.report.failureReason == FailureReason::poolExhausted) {
        report.failureReason = FailureReason::poolExhausted;
        report.succeededAtAlpha = false;
      }
      report.flags = std::move(run.report.flags);
      rec.report = std::move(report);
      rec.violations = std::move(run.violations);
      break;
    }
    case Algorithm::knownD: {
      const StochasticParams params{rec.alpha, config.eta, config.epsilon};
      LowCOptions opts;
      opts.tieBreakSeed = tieBreak;
      auto run = runKnownD(*seen, dist, params, rec.arrivals, opts);
      allocation = std::move(run.allocation);
      rec.report = std::move(run.report);
      rec.violations = std::move(run.outcome.violations);
      rec.extra["path"] = run.outcome.path;
      rec.extra["universal"] = run.outcome.universal.size();
      if (run.outcome.lowC) {
        const auto& s = *run.outcome.lowC;
        const int offset = n - s.nPrime;
        std::vector<std::int64_t> counts(k, 0);
        for (int a = offset; a < n; ++a) ++counts[dist.rankOf(rec.arrivals[a])];
        bool within = true;
        for (int r = 0; r < k; ++r) within = within && counts[r] <= s.caps[r];
        rec.extra["allSaturated"] = s.allSaturated();
        rec.extra["withinCaps"] = within;
        rec.extra["caps"] = s.caps;
        rec.extra["counts"] = counts;
        rec.extra["bags"] = s.bagCount;
      }
      break;
    }
    case Algorithm::unknownD: {
      auto params = UnknownParams::make(config.c, config.eta);
      params.alpha = rec.alpha;
      UnknownOptions opts;
      opts.adversarialChecks = std::min(config.adversarialChecks, InvariantLevel::cheap);
      opts.lowC.tieBreakSeed = tieBreak;
      auto run = runUnknownD(*seen, params, rec.arrivals, deriveSeed(config.masterSeed, t, "split"),
                             opts);
      allocation = std::move(run.allocation);
      rec.report = std::move(run.report);
      rec.violations = std::move(run.violations);
      rec.extra["branch"] = run.branch;
      rec.extra["window"] = run.window;
      rec.extra["learners"] = run.learners;
      rec.extra["learnersMeetingRestrictedShare"] = run.learnersMeetingRestrictedShare;
      if (run.learned) {
        const Rational err = maxAbsError(*run.learned, dist);
        rec.extra["learnedMaxError"] = err.str();
        rec.extra["learnedWithin1/20"] = err <= Rational(1, 20);
      }
      if (run.branch == "split") {
        rec.extra["splitProbability"] = run.splitProbability.str();
        rec.extra["minB1Value"] = run.minB1Value.str();
        rec.extra["splitConcentrated"] = run.splitConcentrated;
      }
      if (run.lowC) rec.extra["allSaturated"] = run.lowC->allSaturated();
      break;
    }
  }

  if (config.perturbBeta) {
    const Rational beta = *config.perturbBeta;
    const TrialReport trueReport =
        verifyAgainst(truth->original, truth->originalMms, allocation, rec.alpha / (beta * beta));
    rec.trueMinRatio = trueReport.minRatio;
    rec.degradationHolds = !rec.report.succeededAtAlpha || trueReport.succeededAtAlpha;
    bool bracket = true;
    for (int i = 0; i < k; ++i) {
      const Rational& mu = truth->originalMms[i];
      const Rational& mue = seen->originalMms[i];
      bracket = bracket && beta * mu >= mue && mue >= mu / beta;
    }
    rec.mmsBracketHolds = bracket;
  }
  return rec;
}

AggregateReport monteCarlo(const McConfig& config) {
  if (config.trials < 0) throw InputError("trials must be non-negative");
  std::vector<std::optional<TrialRecord>> slots(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < config.trials; i = next++) {
      try {
        slots[i] = runTrial(config, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(config.parallelism, config.trials));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  AggregateReport agg;
  agg.algorithm = std::string(toString(config.algorithm));
  agg.instanceLabel = config.instanceLabel;
  agg.masterSeed = config.masterSeed;
  agg.trials = config.trials;
  std::vector<double> mins;
  double sum = 0;
  for (auto& slot : slots) {
    TrialRecord& r = *slot;
    if (r.report.succeededAtAlpha) ++agg.successes;
    agg.minRatio = agg.records.empty() ? r.report.minRatio : min(agg.minRatio, r.report.minRatio);
    mins.push_back(r.report.minRatio.toDouble());
    sum += mins.back();
    ++agg.failureHistogram[std::string(toString(r.report.failureReason))];
    agg.invariantViolations += static_cast<int>(r.violations.size());
    agg.records.push_back(std::move(r));
  }
  if (!mins.empty()) {
    agg.meanRatio = sum / static_cast<double>(mins.size());
    std::sort(mins.begin(), mins.end());
    for (const auto& [name, q] : {std::pair{"p05", 0.05}, {"p50", 0.5}, {"p95", 0.95}}) {
      auto idx = static_cast<std::ptrdiff_t>(std::ceil(q * static_cast<double>(mins.size()))) - 1;
      idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(mins.size()) - 1);
      agg.ratioQuantiles[name] = mins[idx];
    }
  }
  if (config.abortOnViolation) {
    for (const auto& r : agg.records) {
      if (!r.violations.empty()) {
        throw InvariantViolation("trial " + std::to_string(r.trial) + " (master seed " +
                                     std::to_string(config.masterSeed) + "): " + r.violations.front(),
                                 r.seed);
      }
    }
  }
  return agg;
}

json toJson(const TrialRecord& r) {
  json j;
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["algorithm"] = std::string(toString(r.algorithm));
  j["n"] = r.n;
  j["m"] = r.m;
  j["k"] = r.k;
  j["alpha"] = r.alpha.str();
  j["minRatio"] = r.report.minRatio.str();
  j["success"] = r.report.succeededAtAlpha;
  j["failureReason"] = std::string(toString(r.report.failureReason));
  j["flags"] = r.report.flags;
  j["violations"] = r.violations;
  json extra = json::object();
  for (const auto& [key, value] : r.extra) extra[key] = value;
  j["extra"] = std::move(extra);
  if (r.trueMinRatio) j["trueMinRatio"] = r.trueMinRatio->str();
  if (r.degradationHolds) j["degradationHolds"] = *r.degradationHolds;
  if (r.mmsBracketHolds) j["mmsBracketHolds"] = *r.mmsBracketHolds;
  return j;
}

json toJson(const AggregateReport& r) {
  json j;
  j["algorithm"] = r.algorithm;
  j["instance"] = r.instanceLabel;
  j["masterSeed"] = r.masterSeed;
  j["trials"] = r.trials;
  j["successes"] = r.successes;
  j["successRate"] = r.successRate().str();
  j["minRatio"] = r.minRatio.str();
  j["meanRatio"] = r.meanRatio;
  j["ratioQuantiles"] = r.ratioQuantiles;
  j["failureHistogram"] = r.failureHistogram;
  j["invariantViolations"] = r.invariantViolations;
  json records = json::array();
  for (const auto& rec : r.records) records.push_back(toJson(rec));
  j["records"] = std::move(records);
  return j;
}

std::string canonicalJson(const AggregateReport& r) { return toJson(r).dump(); }

AggregateReport aggregateFromJson(const json& j) {
  AggregateReport r;
  try {
    r.algorithm = j.at("algorithm").get<std::string>();
    r.instanceLabel = j.value("instance", "");
    r.masterSeed = j.at("masterSeed").get<std::uint64_t>();
    r.trials = j.at("trials").get<int>();
    r.successes = j.at("successes").get<int>();
    r.minRatio = rationalFromJson(j.at("minRatio"));
    r.meanRatio = j.at("meanRatio").get<double>();
    r.ratioQuantiles = j.at("ratioQuantiles").get<std::map<std::string, double>>();
    r.failureHistogram = j.at("failureHistogram").get<std::map<std::string, int>>();
    r.invariantViolations = j.at("invariantViolations").get<int>();
    for (const auto& x : j.at("records")) {
      TrialRecord rec;
      rec.trial = x.at("trial").get<int>();
      rec.seed = x.at("seed").get<std::uint64_t>();
      rec.algorithm = algorithmFromString(x.at("algorithm").get<std::string>());
      rec.n = x.at("n").get<int>();
      rec.m = x.at("m").get<int>();
      rec.k = x.at("k").get<int>();
      rec.alpha = rationalFromJson(x.at("alpha"));
      rec.report.minRatio = rationalFromJson(x.at("minRatio"));
      rec.report.succeededAtAlpha = x.at("success").get<bool>();
      rec.report.failureReason = failureReasonFromString(x.at("failureReason").get<std::string>());
      rec.report.flags = x.at("flags").get<std::vector<std::string>>();
      rec.violations = x.at("violations").get<std::vector<std::string>>();
      for (const auto& [key, value] : x.at("extra").items()) rec.extra[key] = value;
      if (x.contains("trueMinRatio")) rec.trueMinRatio = rationalFromJson(x.at("trueMinRatio"));
      if (x.contains("degradationHolds")) rec.degradationHolds = x.at("degradationHolds").get<bool>();
      if (x.contains("mmsBracketHolds")) rec.mmsBracketHolds = x.at("mmsBracketHolds").get<bool>();
      r.records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string csvHeader() {
  return "trial,seed,algorithm,n,m,k,alpha,minRatio,success,failureReason\n";
}

std::string toCsv(const AggregateReport& r) {
  std::ostringstream out;
  out << csvHeader();
  for (const auto& rec : r.records) {
    out << rec.trial << ',' << rec.seed << ',' << toString(rec.algorithm) << ',' << rec.n << ','
        << rec.m << ',' << rec.k << ',' << rec.alpha.str() << ',' << rec.report.minRatio.str()
        << ',' << (rec.report.succeededAtAlpha ? "true" : "false") << ','
        << toString(rec.report.failureReason) << '\n';
  }
  return out.str();
}

void emitReport(const AggregateReport& r, ReportFormat format, const std::filesystem::path& path) {
  writeText(path, format == ReportFormat::json ? canonicalJson(r) + "\n" : toCsv(r));
}

}  // namespace mmsonline
