#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "mmsonline/core.hpp"
#include "mmsonline/mms.hpp"

namespace mmsonline {

// Instance files: {"n": int, "m": int, "types": [["num/den", ...], ...],
// "names": [str] (optional), "witnesses": [[[item, ...], ...], ...] (optional,
// one n-bundle partition per type, each bundle worth exactly 1)}.
// Distribution files: {"probs": ["1/2", ...]}. Arrival files: [type, ...].

nlohmann::json toJson(const Rational& r);
Rational rationalFromJson(const nlohmann::json& j);

struct InstanceFile {
  Instance instance;
  std::optional<std::vector<std::vector<Bundle>>> witnesses;
};

nlohmann::json instanceToJson(const Instance& instance,
                              const std::vector<std::vector<Bundle>>* witnesses = nullptr);
InstanceFile instanceFromJson(const nlohmann::json& j);

nlohmann::json distributionToJson(const TypeDistribution& d);
TypeDistribution distributionFromJson(const nlohmann::json& j);

/// Reads and parses JSON, throwing InputError on I/O or syntax problems.
nlohmann::json readJson(const std::filesystem::path& path);
void writeText(const std::filesystem::path& path, const std::string& text);

InstanceFile loadInstance(const std::filesystem::path& path);
TypeDistribution loadDistribution(const std::filesystem::path& path);
std::vector<int> loadArrivals(const std::filesystem::path& path);

/// Certified witnesses when present, otherwise the exact solver.
NormalizedInstance normalizeFile(const InstanceFile& file, const MmsOptions& options = {});

}  // namespace mmsonline
