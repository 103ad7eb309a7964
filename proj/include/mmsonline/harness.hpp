#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmsonline/adversarial.hpp"
#include "mmsonline/core.hpp"
#include "mmsonline/mms.hpp"
#include "mmsonline/stochastic.hpp"
#include "mmsonline/unknown.hpp"

namespace mmsonline {

enum class Algorithm { adversarial, knownD, unknownD };
std::string_view toString(Algorithm a);
Algorithm algorithmFromString(std::string_view text);

/// Multiplies every value by an independent factor j/120, j drawn uniformly
/// from [ceil(120/beta), floor(120 beta)], so 1/beta <= factor <= beta. The
/// common denominator keeps normalized values within 64-bit rationals.
Instance perturb(const Instance& instance, const Rational& beta, std::uint64_t seed);

struct McConfig {
  Algorithm algorithm = Algorithm::adversarial;
  /// Shared instance for every trial; when absent `generator` builds one per
  /// trial from the trial's "instance" substream.
  std::optional<NormalizedInstance> instance;
  std::function<NormalizedInstance(std::uint64_t seed)> generator;
  std::string instanceLabel;
  /// Arrival distribution. knownD hands it to the algorithm; unknownD only
  /// samples from it. Defaults to uniform.
  std::optional<TypeDistribution> hiddenDist;
  /// Success threshold; defaults to 1/k for adversarial and 1/(2(1+eta)) otherwise.
  std::optional<Rational> alpha;
  Rational eta = Rational(1, 2);
  Rational epsilon = Rational(1, 10);
  Rational c = Rational(1, 20);
  int trials = 1;
  std::uint64_t masterSeed = 0;
  int parallelism = 1;
  /// adversarial only: trial t plays the t-th sequence of [0,k)^n in
  /// lexicographic order instead of a sampled one.
  bool exhaustive = false;
  /// Randomized tie-breaking from the trial's "tiebreak" substream.
  bool randomTieBreak = false;
  InvariantLevel adversarialChecks = InvariantLevel::full;
  /// Learning-augmented mode: the algorithm sees perturbed valuations and
  /// the allocation is also judged against the true ones at alpha / beta^2.
  std::optional<Rational> perturbBeta;
  MmsOptions solver;
  /// Throw InvariantViolation for the lowest failing trial once all trials end.
  bool abortOnViolation = true;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::adversarial;
  int n = 0;
  int m = 0;
  int k = 0;
  Rational alpha;
  TrialReport report;
  std::vector<int> arrivals;
  std::vector<std::string> violations;
  std::map<std::string, nlohmann::json> extra;  // algorithm-specific measurements
  // learning-augmented mode
  std::optional<Rational> trueMinRatio;
  std::optional<bool> degradationHolds;  // perturbed success implies true ratios >= alpha/beta^2
  std::optional<bool> mmsBracketHolds;   // beta MMS >= perturbed MMS >= MMS / beta
};

struct AggregateReport {
  std::string algorithm;
  std::string instanceLabel;
  std::uint64_t masterSeed = 0;
  int trials = 0;
  std::vector<TrialRecord> records;  // sorted by trial index
  int successes = 0;
  Rational minRatio;
  double meanRatio = 0;
  std::map<std::string, double> ratioQuantiles;  // p05, p50, p95 of per-trial min ratios
  std::map<std::string, int> failureHistogram;
  int invariantViolations = 0;

  Rational successRate() const {
    return trials == 0 ? Rational(0) : Rational(successes, trials);
  }
};

/// Runs `trials` independent trials; per-trial randomness comes from
/// deriveSeed(masterSeed, trial, stream), so the report does not depend on
/// `parallelism`.
AggregateReport monteCarlo(const McConfig& config);

/// One trial, exactly as monteCarlo runs it.
TrialRecord runTrial(const McConfig& config, int trial);

nlohmann::json toJson(const TrialRecord& r);
nlohmann::json toJson(const AggregateReport& r);
/// Sorted keys, no whitespace, no timestamps.
std::string canonicalJson(const AggregateReport& r);
AggregateReport aggregateFromJson(const nlohmann::json& j);

std::string csvHeader();
std::string toCsv(const AggregateReport& r);

enum class ReportFormat { json, csv };
void emitReport(const AggregateReport& r, ReportFormat format, const std::filesystem::path& path);

}  // namespace mmsonline
