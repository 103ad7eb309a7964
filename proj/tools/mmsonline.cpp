// mmsonline {gen|mms|run|mc|perturb|report}
// Exit codes: 0 clean, 1 input error, 2 invariant violation.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmsonline/adversarial.hpp"
#include "mmsonline/arrivals.hpp"
#include "mmsonline/genlab.hpp"
#include "mmsonline/harness.hpp"
#include "mmsonline/instance_io.hpp"
#include "mmsonline/mms.hpp"

using namespace mmsonline;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out;
};

Rational parseRational(const std::string& text, const char* what) {
  try {
    return Rational::parse(text);
  } catch (const std::exception&) {
    throw InputError(std::string("bad ") + what + ": " + text);
  }
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
  } else {
    writeText(g.out, text);
  }
}

void emitJson(const Globals& g, const json& j) { emit(g, j.dump(2) + "\n"); }

ReportFormat reportFormat(const Globals& g) {
  if (g.format == "json") return ReportFormat::json;
  if (g.format == "csv") return ReportFormat::csv;
  throw InputError("unknown format " + g.format);
}

void emitAggregate(const Globals& g, const AggregateReport& r) {
  const auto f = reportFormat(g);
  emit(g, f == ReportFormat::json ? canonicalJson(r) + "\n" : toCsv(r));
}

json allocationJson(const Allocation& a) {
  json j = json::array();
  for (const auto& e : a.entries) {
    j.push_back({{"agent", e.agent}, {"type", e.type}, {"bundle", e.bundle.items()}});
  }
  return j;
}

json reportJson(const TrialReport& r) {
  json ratios = json::array();
  for (const auto& x : r.perAgentRatio) ratios.push_back(x.str());
  return {{"minRatio", r.minRatio.str()},
          {"success", r.succeededAtAlpha},
          {"failureReason", std::string(toString(r.failureReason))},
          {"perAgentRatio", ratios},
          {"flags", r.flags}};
}

InvariantLevel checksFromString(const std::string& s) {
  if (s == "none") return InvariantLevel::none;
  if (s == "cheap") return InvariantLevel::cheap;
  if (s == "full") return InvariantLevel::full;
  throw InputError("unknown check level " + s);
}

struct McArgs {
  std::string algorithm = "adversarial";
  std::string instance;
  std::string dist;
  std::string alpha;
  std::string eta = "1/2";
  std::string epsilon = "1/10";
  std::string c = "1/20";
  std::string beta;
  std::string checks = "full";
  int trials = 1;
  int parallelism = 1;
  bool exhaustive = false;
  bool randomTieBreak = false;
};

void addMcOptions(CLI::App* cmd, McArgs& a, bool withAlgorithm) {
  if (withAlgorithm) {
    cmd->add_option("--algorithm", a.algorithm, "adversarial | known-d | unknown-d");
    cmd->add_option("--dist", a.dist, "arrival distribution file");
    cmd->add_option("--c", a.c, "learning exponent parameter");
  }
  cmd->add_option("--instance", a.instance, "instance file")->required();
  cmd->add_option("--alpha", a.alpha, "success threshold");
  cmd->add_option("--eta", a.eta);
  cmd->add_option("--epsilon", a.epsilon);
  cmd->add_option("--trials", a.trials)->check(CLI::NonNegativeNumber);
  cmd->add_option("--parallelism", a.parallelism)->check(CLI::PositiveNumber);
  cmd->add_option("--beta", a.beta, "learning-augmented perturbation factor");
  cmd->add_flag("--random-tie-break", a.randomTieBreak);
}

AggregateReport runMc(const Globals& g, const McArgs& a) {
  McConfig cfg;
  cfg.algorithm = algorithmFromString(a.algorithm);
  const auto file = loadInstance(a.instance);
  cfg.instance = normalizeFile(file);
  cfg.instanceLabel = a.instance;
  if (!a.dist.empty()) cfg.hiddenDist = loadDistribution(a.dist);
  if (!a.alpha.empty()) cfg.alpha = parseRational(a.alpha, "alpha");
  cfg.eta = parseRational(a.eta, "eta");
  cfg.epsilon = parseRational(a.epsilon, "epsilon");
  cfg.c = parseRational(a.c, "c");
  if (!a.beta.empty()) cfg.perturbBeta = parseRational(a.beta, "beta");
  cfg.trials = a.trials;
  cfg.parallelism = a.parallelism;
  cfg.masterSeed = g.seed;
  cfg.exhaustive = a.exhaustive;
  cfg.randomTieBreak = a.randomTieBreak;
  cfg.adversarialChecks = checksFromString(a.checks);
  return monteCarlo(cfg);
}

int runAdversarialCommand(const Globals& g, const std::string& instancePath,
                          const std::string& arrivalsPath, bool enumerate, bool trace,
                          const std::string& checks) {
  const auto inst = normalizeFile(loadInstance(instancePath));
  AdversarialOptions opts;
  opts.checks = checksFromString(checks);
  opts.trace = trace;
  if (enumerate) {
    std::int64_t sequences = 0;
    std::int64_t successes = 0;
    std::optional<Rational> worst;
    json violations = json::array();
    ArrivalSource::enumerate(inst.k(), inst.n(), [&](std::span<const int> seq) {
      auto source = ArrivalSource::fixed({seq.begin(), seq.end()});
      auto r = runAdversarial(inst, source, opts);
      ++sequences;
      if (r.report.succeededAtAlpha) ++successes;
      worst = worst ? min(*worst, r.report.minRatio) : r.report.minRatio;
      for (const auto& v : r.violations) {
        violations.push_back({{"sequence", std::vector<int>(seq.begin(), seq.end())}, {"what", v}});
      }
      if (trace) {
        for (const auto& line : r.report.stepTrace) std::cerr << line << '\n';
      }
    });
    emitJson(g, {{"sequences", sequences},
                 {"successes", successes},
                 {"minRatio", worst ? worst->str() : "1"},
                 {"violations", violations}});
    return violations.empty() ? 0 : 2;
  }
  if (arrivalsPath.empty()) throw InputError("give --arrivals or --enumerate");
  auto source = ArrivalSource::fixed(loadArrivals(arrivalsPath));
  auto r = runAdversarial(inst, source, opts);
  if (trace) {
    for (const auto& line : r.report.stepTrace) std::cerr << line << '\n';
  }
  emitJson(g, {{"allocation", allocationJson(r.allocation)},
               {"report", reportJson(r.report)},
               {"violations", r.violations}});
  return r.violations.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online maximin-share allocation: algorithms, constructions and experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--format", g.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "output path (stdout when omitted)");

  int result = 0;

  // gen
  auto* gen = app.add_subcommand("gen", "write a generated instance");
  gen->require_subcommand(1);
  int n = 4;
  int m = 8;
  int k = 2;
  std::string eps = "1/10";
  std::string pk = "1/10";
  std::string model = "uniform";
  std::string density = "1/2";
  bool planted = false;
  int itemsPerBundle = 6;

  auto* genEx1 = gen->add_subcommand("example1", "two agents, second type revealed later");
  genEx1->add_option("--m", m);
  genEx1->callback([&] { emitJson(g, instanceToJson(genExample1(m).instance)); });

  auto* genAdv = gen->add_subcommand("adv-counter", "counterexample for pre-saturation reserves");
  genAdv->add_option("--n", n);
  genAdv->add_option("--eps", eps);
  genAdv->callback([&] {
    emitJson(g, instanceToJson(genAdvCounterexample(n, parseRational(eps, "eps"))));
  });

  auto* genLb = gen->add_subcommand("lower-bound", "sqrt(k) lower-bound construction");
  genLb->add_option("--k", k);
  genLb->add_option("--n", n);
  genLb->callback([&] { emitJson(g, instanceToJson(genLowerBound(k, n).instance)); });

  auto* genHalf = gen->add_subcommand("tight-half", "alpha = 1/2 tightness instance");
  genHalf->add_option("--k", k);
  genHalf->add_option("--n", n);
  genHalf->add_option("--eps", eps);
  genHalf->callback([&] {
    emitJson(g, instanceToJson(genTightnessHalf(k, n, parseRational(eps, "eps"))));
  });

  auto* genPk = gen->add_subcommand("tight-pk", "p_k tightness instance with its distribution");
  genPk->add_option("--k", k);
  genPk->add_option("--n", n);
  genPk->add_option("--pk", pk);
  genPk->callback([&] {
    auto t = genTightnessPk(k, n, parseRational(pk, "pk"));
    json j = instanceToJson(t.instance);
    j["distribution"] = distributionToJson(t.distribution)["probs"];
    emitJson(g, j);
  });

  auto* genRand = gen->add_subcommand("random", "seeded random instance");
  genRand->add_option("--n", n);
  genRand->add_option("--m", m);
  genRand->add_option("--k", k);
  genRand->add_option("--model", model)->check(CLI::IsMember({"uniform", "binary", "clustered"}));
  genRand->add_option("--density", density);
  genRand->add_flag("--planted", planted, "planted witnesses, normalized, certified");
  genRand->add_option("--items-per-bundle", itemsPerBundle);
  genRand->callback([&] {
    if (planted) {
      PlantedOptions po;
      po.itemsPerBundle = itemsPerBundle;
      auto inst = genPlanted(n, k, po, g.seed);
      emitJson(g, instanceToJson(inst.base, &inst.witnessPartitions));
      return;
    }
    const ValueModel vm = model == "binary"      ? ValueModel::binary(parseRational(density, "density"))
                          : model == "clustered" ? ValueModel::clustered()
                                                 : ValueModel::uniform();
    emitJson(g, instanceToJson(genRandom(n, m, k, vm, g.seed)));
  });

  // mms
  auto* mms = app.add_subcommand("mms", "maximin share");
  mms->require_subcommand(1);
  auto* solve = mms->add_subcommand("solve", "exact MMS of one type");
  std::string instancePath;
  int type = 0;
  int bundles = 0;
  bool bruteForce = false;
  solve->add_option("--instance", instancePath)->required();
  solve->add_option("--type", type);
  solve->add_option("--bundles", bundles, "defaults to n");
  solve->add_flag("--brute-force", bruteForce);
  solve->callback([&] {
    const auto file = loadInstance(instancePath);
    const auto& inst = file.instance;
    if (type < 0 || type >= inst.kTypes()) throw InputError("type out of range");
    const int b = bundles > 0 ? bundles : inst.nAgents;
    const MmsResult r = bruteForce ? mmsBruteForce(inst.values(type), b)
                                   : mmsExact(inst.values(type), b);
    json witness = json::array();
    for (const auto& bundle : r.witnessPartition) witness.push_back(bundle.items());
    emitJson(g, {{"value", r.value.str()},
                 {"exact", r.exact},
                 {"witness", witness},
                 {"nodes", r.nodes}});
  });

  // run
  auto* run = app.add_subcommand("run", "run one algorithm");
  run->require_subcommand(1);

  auto* runAdv = run->add_subcommand("adversarial", "1/k algorithm on given or all sequences");
  std::string arrivalsPath;
  bool enumerate = false;
  bool trace = false;
  std::string checks = "full";
  runAdv->add_option("--instance", instancePath)->required();
  auto* arrOpt = runAdv->add_option("--arrivals", arrivalsPath, "JSON array of type ids");
  runAdv->add_flag("--enumerate", enumerate, "every sequence in [0,k)^n")->excludes(arrOpt);
  runAdv->add_flag("--trace", trace, "one JSON line per step on stderr");
  runAdv->add_option("--checks", checks)->check(CLI::IsMember({"none", "cheap", "full"}));
  runAdv->callback([&] {
    result = runAdversarialCommand(g, instancePath, arrivalsPath, enumerate, trace, checks);
  });

  McArgs knownArgs;
  knownArgs.algorithm = "known-d";
  auto* runKnown = run->add_subcommand("known-d", "known-distribution algorithm");
  addMcOptions(runKnown, knownArgs, false);
  runKnown->add_option("--dist", knownArgs.dist)->required();
  runKnown->callback([&] { emitAggregate(g, runMc(g, knownArgs)); });

  McArgs unknownArgs;
  unknownArgs.algorithm = "unknown-d";
  auto* runUnknown = run->add_subcommand("unknown-d", "learn-then-allocate algorithm");
  addMcOptions(runUnknown, unknownArgs, false);
  runUnknown->add_option("--hidden-dist", unknownArgs.dist)->required();
  runUnknown->add_option("--c", unknownArgs.c);
  runUnknown->callback([&] { emitAggregate(g, runMc(g, unknownArgs)); });

  // mc
  McArgs mcArgs;
  auto* mc = app.add_subcommand("mc", "Monte-Carlo trials of one algorithm");
  addMcOptions(mc, mcArgs, true);
  mc->add_flag("--exhaustive", mcArgs.exhaustive, "adversarial: trial t plays sequence t");
  mc->add_option("--checks", mcArgs.checks)->check(CLI::IsMember({"none", "cheap", "full"}));
  mc->callback([&] { emitAggregate(g, runMc(g, mcArgs)); });

  // perturb
  auto* pert = app.add_subcommand("perturb", "multiplicative noise in [1/beta, beta]");
  std::string beta = "6/5";
  pert->add_option("--instance", instancePath)->required();
  pert->add_option("--beta", beta);
  pert->callback([&] {
    const auto file = loadInstance(instancePath);
    emitJson(g, instanceToJson(perturb(file.instance, parseRational(beta, "beta"), g.seed)));
  });

  // report
  auto* rep = app.add_subcommand("report", "convert a JSON aggregate report");
  std::string input;
  rep->add_option("--input", input, "JSON report from mc/run")->required();
  rep->callback([&] { emitAggregate(g, aggregateFromJson(readJson(input))); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << " (reproduce with seed " << e.seed()
              << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return result;
}
