#include "mmsonline/core.hpp"

#include <algorithm>
#include <numeric>

namespace mmsonline {

Bundle::Bundle(std::initializer_list<int> items) : Bundle(std::vector<int>(items)) {}

Bundle::Bundle(std::vector<int> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  if (std::adjacent_find(items_.begin(), items_.end()) != items_.end()) {
    throw InputError("bundle contains a duplicate item");
  }
  if (!items_.empty() && items_.front() < 0) throw InputError("negative item id in bundle");
}

bool Bundle::contains(int item) const {
  return std::binary_search(items_.begin(), items_.end(), item);
}

void Bundle::pushBackSorted(int item) {
  if (!items_.empty() && items_.back() >= item) throw InputError("pushBackSorted out of order");
  items_.push_back(item);
}

Rational value(std::span<const Rational> valuation, const Bundle& bundle) {
  Rational sum;
  for (const int g : bundle) {
    if (g < 0 || static_cast<std::size_t>(g) >= valuation.size()) {
      throw InputError("item " + std::to_string(g) + " out of range");
    }
    sum += valuation[g];
  }
  return sum;
}

Rational totalValue(std::span<const Rational> valuation) {
  Rational sum;
  for (const auto& v : valuation) sum += v;
  return sum;
}

void Instance::validate() const {
  if (nAgents < 1) throw InputError("instance needs n >= 1");
  if (mItems < 0) throw InputError("instance needs m >= 0");
  if (typeValues.empty()) throw InputError("instance needs k >= 1");
  for (std::size_t i = 0; i < typeValues.size(); ++i) {
    if (static_cast<int>(typeValues[i].size()) != mItems) {
      throw InputError("type " + std::to_string(i) + " has " +
                       std::to_string(typeValues[i].size()) + " values, expected " +
                       std::to_string(mItems));
    }
    for (const auto& v : typeValues[i]) {
      if (v < Rational{}) throw InputError("negative value for type " + std::to_string(i));
    }
  }
  if (!typeNames.empty() && typeNames.size() != typeValues.size()) {
    throw InputError("names must match the number of types");
  }
}

namespace {

void checkPartition(const std::vector<Bundle>& parts, int nAgents, int mItems, int type) {
  if (static_cast<int>(parts.size()) != nAgents) {
    throw InputError("witness for type " + std::to_string(type) + " has " +
                     std::to_string(parts.size()) + " bundles, expected " +
                     std::to_string(nAgents));
  }
  std::vector<char> seen(mItems, 0);
  for (const auto& b : parts) {
    for (const int g : b) {
      if (g >= mItems) throw InputError("witness item out of range");
      if (seen[g]) throw InputError("witness bundles overlap at item " + std::to_string(g));
      seen[g] = 1;
    }
  }
  if (std::count(seen.begin(), seen.end(), 0) != 0) {
    throw InputError("witness for type " + std::to_string(type) + " does not cover every item");
  }
}

}  // namespace

NormalizedInstance NormalizedInstance::fromCertified(Instance instance,
                                                     std::vector<std::vector<Bundle>> witnesses) {
  instance.validate();
  const int k = instance.kTypes();
  if (static_cast<int>(witnesses.size()) != k) throw InputError("one witness per type required");
  NormalizedInstance out;
  out.originalMms.assign(k, Rational(1));
  out.zeroMms.assign(k, false);
  for (int i = 0; i < k; ++i) {
    checkPartition(witnesses[i], instance.nAgents, instance.mItems, i);
    for (const auto& b : witnesses[i]) {
      if (value(instance.values(i), b) != Rational(1)) {
        throw InputError("certified witness bundle of type " + std::to_string(i) +
                         " is not worth exactly 1");
      }
    }
  }
  out.witnessPartitions = std::move(witnesses);
  out.original = instance;
  out.base = std::move(instance);
  return out;
}

NormalizedInstance normalize(const Instance& instance, const MmsSolver& solver) {
  instance.validate();
  const int k = instance.kTypes();
  NormalizedInstance out;
  out.original = instance;
  out.base = instance;
  out.originalMms.resize(k);
  out.witnessPartitions.resize(k);
  out.zeroMms.assign(k, false);

  for (int i = 0; i < k; ++i) {
    MmsResult mms = solver(instance.values(i), instance.nAgents);
    if (!mms.exact) throw CapacityError("normalization requires an exact MMS value");
    checkPartition(mms.witnessPartition, instance.nAgents, instance.mItems, i);
    out.originalMms[i] = mms.value;
    if (mms.value.isZero()) {
      out.zeroMms[i] = true;
      out.witnessPartitions[i] = std::move(mms.witnessPartition);
      continue;
    }
    auto& scaled = out.base.typeValues[i];
    for (const auto& bundle : mms.witnessPartition) {
      const Rational bundleValue = value(instance.values(i), bundle);
      for (const int g : bundle) scaled[g] = instance.typeValues[i][g] / bundleValue;
    }
    out.witnessPartitions[i] = std::move(mms.witnessPartition);
  }
  return out;
}

Bundle universallyHighValued(const NormalizedInstance& instance, const Rational& alpha) {
  std::vector<int> all(instance.m());
  std::iota(all.begin(), all.end(), 0);
  return universallyHighValued(instance, alpha, Bundle(std::move(all)));
}

Bundle universallyHighValued(const NormalizedInstance& instance, const Rational& alpha,
                             const Bundle& candidates) {
  Bundle out;
  for (const int g : candidates) {
    bool universal = true;
    for (int i = 0; i < instance.k() && universal; ++i) {
      if (instance.isZeroMms(i)) continue;
      universal = instance.base.typeValues[i][g] >= alpha;
    }
    if (universal) out.pushBackSorted(g);
  }
  return out;
}

void Allocation::validate(int mItems) const {
  std::vector<int> owner(mItems, -1);
  int lastAgent = -1;
  for (const auto& e : entries) {
    if (e.agent <= lastAgent) throw ValidationError("agent indices must strictly increase");
    lastAgent = e.agent;
    for (const int g : e.bundle) {
      if (g >= mItems) {
        throw ValidationError("agent " + std::to_string(e.agent) + " received unknown item " +
                              std::to_string(g));
      }
      if (owner[g] >= 0) {
        throw ValidationError("agents " + std::to_string(owner[g]) + " and " +
                              std::to_string(e.agent) + " both received item " +
                              std::to_string(g));
      }
      owner[g] = e.agent;
    }
  }
}

TypeDistribution TypeDistribution::fromProbabilities(std::vector<Rational> byOriginalType) {
  if (byOriginalType.empty()) throw InputError("distribution needs at least one type");
  Rational sum;
  for (const auto& p : byOriginalType) {
    if (p < Rational{}) throw InputError("negative probability");
    sum += p;
  }
  if (sum != Rational(1)) throw InputError("probabilities sum to " + sum.str() + ", not 1");

  const int k = static_cast<int>(byOriginalType.size());
  TypeDistribution d;
  d.toOriginal_.resize(k);
  std::iota(d.toOriginal_.begin(), d.toOriginal_.end(), 0);
  std::stable_sort(d.toOriginal_.begin(), d.toOriginal_.end(),
                   [&](int a, int b) { return byOriginalType[a] > byOriginalType[b]; });
  d.toRank_.resize(k);
  d.sorted_.reserve(k);
  for (int r = 0; r < k; ++r) {
    d.toRank_[d.toOriginal_[r]] = r;
    d.sorted_.push_back(byOriginalType[d.toOriginal_[r]]);
  }
  return d;
}

std::vector<Rational> TypeDistribution::byOriginalType() const {
  std::vector<Rational> out(k());
  for (int r = 0; r < k(); ++r) out[toOriginal_[r]] = sorted_[r];
  return out;
}

std::string_view toString(FailureReason reason) {
  switch (reason) {
    case FailureReason::none: return "none";
    case FailureReason::emptyReserve: return "emptyReserve";
    case FailureReason::poolExhausted: return "poolExhausted";
    case FailureReason::valueBelowAlpha: return "valueBelowAlpha";
  }
  return "none";
}

FailureReason failureReasonFromString(std::string_view text) {
  for (auto r : {FailureReason::none, FailureReason::emptyReserve, FailureReason::poolExhausted,
                 FailureReason::valueBelowAlpha}) {
    if (toString(r) == text) return r;
  }
  throw InputError("unknown failure reason '" + std::string(text) + "'");
}

void TrialReport::flag(const std::string& name) {
  if (!hasFlag(name)) flags.push_back(name);
}

bool TrialReport::hasFlag(std::string_view name) const {
  return std::find(flags.begin(), flags.end(), name) != flags.end();
}

TrialReport verifyAgainst(const Instance& instance, std::span<const Rational> mmsPerType,
                          const Allocation& allocation, const Rational& alpha) {
  allocation.validate(instance.mItems);
  TrialReport report;
  report.minRatio = Rational(1);
  bool first = true;
  for (const auto& e : allocation.entries) {
    if (e.type < 0 || e.type >= instance.kTypes()) throw ValidationError("unknown agent type");
    const Rational& mms = mmsPerType[e.type];
    const Rational ratio =
        mms.isZero() ? Rational(1) : value(instance.values(e.type), e.bundle) / mms;
    report.perAgentRatio.push_back(ratio);
    report.minRatio = first ? ratio : min(report.minRatio, ratio);
    first = false;
  }
  report.succeededAtAlpha = true;
  for (const auto& r : report.perAgentRatio) {
    if (r < alpha) report.succeededAtAlpha = false;
  }
  report.failureReason =
      report.succeededAtAlpha ? FailureReason::none : FailureReason::valueBelowAlpha;
  return report;
}

TrialReport verifyAllocation(const NormalizedInstance& instance, const Allocation& allocation,
                             const Rational& alpha) {
  std::vector<Rational> mms(instance.k());
  for (int i = 0; i < instance.k(); ++i) mms[i] = instance.normalizedMms(i);
  return verifyAgainst(instance.base, mms, allocation, alpha);
}

}  // namespace mmsonline
