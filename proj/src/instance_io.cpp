#include "mmsonline/instance_io.hpp"

#include <fstream>

namespace mmsonline {

using nlohmann::json;

json toJson(const Rational& r) { return r.str(); }

Rational rationalFromJson(const json& j) {
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number()) return Rational::parse(j.dump());
  } catch (const std::overflow_error&) {
    throw InputError("rational out of range: " + j.dump());
  }
  throw InputError("expected a rational, got " + j.dump());
}

json instanceToJson(const Instance& instance, const std::vector<std::vector<Bundle>>* witnesses) {
  json j;
  j["n"] = instance.nAgents;
  j["m"] = instance.mItems;
  json types = json::array();
  for (const auto& v : instance.typeValues) {
    json row = json::array();
    for (const auto& x : v) row.push_back(toJson(x));
    types.push_back(std::move(row));
  }
  j["types"] = std::move(types);
  if (!instance.typeNames.empty()) j["names"] = instance.typeNames;
  if (witnesses != nullptr) {
    json w = json::array();
    for (const auto& partition : *witnesses) {
      json p = json::array();
      for (const auto& b : partition) p.push_back(b.items());
      w.push_back(std::move(p));
    }
    j["witnesses"] = std::move(w);
  }
  return j;
}

InstanceFile instanceFromJson(const json& j) {
  if (!j.is_object()) throw InputError("instance must be a JSON object");
  for (const char* key : {"n", "m", "types"}) {
    if (!j.contains(key)) throw InputError(std::string("instance is missing \"") + key + "\"");
  }
  InstanceFile file;
  Instance& inst = file.instance;
  try {
    inst.nAgents = j.at("n").get<int>();
    inst.mItems = j.at("m").get<int>();
    for (const auto& row : j.at("types")) {
      Valuation v;
      for (const auto& x : row) v.push_back(rationalFromJson(x));
      inst.typeValues.push_back(std::move(v));
    }
    if (j.contains("names")) inst.typeNames = j.at("names").get<std::vector<std::string>>();
    if (j.contains("witnesses")) {
      std::vector<std::vector<Bundle>> w;
      for (const auto& partition : j.at("witnesses")) {
        std::vector<Bundle> p;
        for (const auto& b : partition) p.emplace_back(b.get<std::vector<int>>());
        w.push_back(std::move(p));
      }
      file.witnesses = std::move(w);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed instance: ") + e.what());
  }
  inst.validate();
  return file;
}

json distributionToJson(const TypeDistribution& d) {
  json probs = json::array();
  for (const auto& p : d.byOriginalType()) probs.push_back(toJson(p));
  return json{{"probs", probs}};
}

TypeDistribution distributionFromJson(const json& j) {
  const json* probs = &j;
  if (j.is_object()) {
    if (!j.contains("probs")) throw InputError("distribution is missing \"probs\"");
    probs = &j.at("probs");
  }
  if (!probs->is_array()) throw InputError("distribution probabilities must be an array");
  std::vector<Rational> p;
  for (const auto& x : *probs) p.push_back(rationalFromJson(x));
  return TypeDistribution::fromProbabilities(std::move(p));
}

json readJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void writeText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

InstanceFile loadInstance(const std::filesystem::path& path) {
  return instanceFromJson(readJson(path));
}

TypeDistribution loadDistribution(const std::filesystem::path& path) {
  return distributionFromJson(readJson(path));
}

std::vector<int> loadArrivals(const std::filesystem::path& path) {
  const json j = readJson(path);
  try {
    return j.get<std::vector<int>>();
  } catch (const json::exception&) {
    throw InputError(path.string() + ": arrivals must be an array of type ids");
  }
}

NormalizedInstance normalizeFile(const InstanceFile& file, const MmsOptions& options) {
  if (file.witnesses) return NormalizedInstance::fromCertified(file.instance, *file.witnesses);
  return normalize(file.instance, exactSolver(options));
}

}  // namespace mmsonline
