#include "mmsonline/mms.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace mmsonline {
namespace {

using i128 = __int128;

/// Valuation rescaled to a common denominator.
struct IntegerValuation {
  std::vector<std::int64_t> weights;
  std::int64_t scale = 1;  // value = weight / scale
};

IntegerValuation toIntegers(std::span<const Rational> valuation) {
  IntegerValuation out;
  i128 lcm = 1;
  for (const auto& v : valuation) {
    const i128 d = v.den();
    i128 a = lcm, b = d;
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    lcm = lcm / a * d;
    if (lcm > std::numeric_limits<std::int64_t>::max()) {
      throw CapacityError("valuation denominators too large for the exact solver");
    }
  }
  out.scale = static_cast<std::int64_t>(lcm);
  i128 total = 0;
  out.weights.reserve(valuation.size());
  for (const auto& v : valuation) {
    const i128 w = static_cast<i128>(v.num()) * (lcm / v.den());
    total += w;
    if (total > std::numeric_limits<std::int64_t>::max() / 2) {
      throw CapacityError("valuation total too large for the exact solver");
    }
    out.weights.push_back(static_cast<std::int64_t>(w));
  }
  return out;
}

std::vector<int> orderByValue(std::span<const Rational> valuation) {
  std::vector<int> order(valuation.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return valuation[a] > valuation[b]; });
  return order;
}

Rational minBundleValue(std::span<const Rational> valuation, const std::vector<Bundle>& parts) {
  Rational best;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    const Rational v = value(valuation, parts[j]);
    if (j == 0 || v < best) best = v;
  }
  return best;
}

std::vector<Bundle> toBundles(const std::vector<std::vector<int>>& parts) {
  std::vector<Bundle> out;
  out.reserve(parts.size());
  for (const auto& p : parts) out.emplace_back(p);
  return out;
}

void checkArguments(std::span<const Rational> valuation, int nBundles) {
  if (nBundles < 1) throw InputError("number of bundles must be >= 1");
  for (const auto& v : valuation) {
    if (v < Rational{}) throw InputError("valuation must be non-negative");
  }
}

class BranchAndBound {
 public:
  BranchAndBound(std::vector<std::int64_t> weights, int nBundles, std::int64_t incumbent,
                 std::vector<int> incumbentAssignment, std::int64_t upper, std::uint64_t maxNodes)
      : weights_(std::move(weights)),
        n_(nBundles),
        best_(incumbent),
        bestAssignment_(std::move(incumbentAssignment)),
        upper_(upper),
        maxNodes_(maxNodes),
        loads_(nBundles, 0),
        assignment_(weights_.size(), 0),
        suffix_(weights_.size() + 1, 0) {
    for (std::size_t i = weights_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + weights_[i];
  }

  /// Returns false when the node budget ran out.
  bool run() {
    if (best_ >= upper_) return true;
    search(0);
    return !exhausted_;
  }

  std::int64_t best() const { return best_; }
  const std::vector<int>& bestAssignment() const { return bestAssignment_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  void search(std::size_t idx) {
    if (done_) return;
    if (++nodes_ > maxNodes_) {
      exhausted_ = done_ = true;
      return;
    }
    const std::int64_t target = best_ + 1;
    std::int64_t deficit = 0;
    for (const auto load : loads_) deficit += std::max<std::int64_t>(0, target - load);
    if (deficit > suffix_[idx]) return;

    if (idx == weights_.size()) {
      const std::int64_t low = *std::min_element(loads_.begin(), loads_.end());
      if (low > best_) {
        best_ = low;
        bestAssignment_ = assignment_;
        if (best_ >= upper_) done_ = true;
      }
      return;
    }

    // Lightest bundle first; equal loads are interchangeable, try one of them.
    std::vector<int> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return loads_[a] != loads_[b] ? loads_[a] < loads_[b] : a < b;
    });
    std::int64_t previous = -1;
    for (const int j : order) {
      if (loads_[j] == previous) continue;
      previous = loads_[j];
      loads_[j] += weights_[idx];
      assignment_[idx] = j;
      search(idx + 1);
      loads_[j] -= weights_[idx];
      if (done_) return;
    }
  }

  std::vector<std::int64_t> weights_;
  int n_;
  std::int64_t best_;
  std::vector<int> bestAssignment_;
  std::int64_t upper_;
  std::uint64_t maxNodes_;
  std::uint64_t nodes_ = 0;
  bool done_ = false;
  bool exhausted_ = false;
  std::vector<std::int64_t> loads_;
  std::vector<int> assignment_;
  std::vector<std::int64_t> suffix_;
};

}  // namespace

std::vector<Bundle> lptPartition(std::span<const Rational> valuation, int nBundles) {
  checkArguments(valuation, nBundles);
  std::vector<std::vector<int>> parts(nBundles);
  std::vector<Rational> loads(nBundles);
  for (const int g : orderByValue(valuation)) {
    const auto lightest = std::min_element(loads.begin(), loads.end()) - loads.begin();
    parts[lightest].push_back(g);
    loads[lightest] += valuation[g];
  }
  return toBundles(parts);
}

MmsResult mmsExact(std::span<const Rational> valuation, int nBundles, const MmsOptions& options) {
  checkArguments(valuation, nBundles);
  const int m = static_cast<int>(valuation.size());
  MmsResult result;

  if (nBundles == 1) {
    std::vector<int> all(m);
    std::iota(all.begin(), all.end(), 0);
    result.witnessPartition = {Bundle(std::move(all))};
    result.value = result.lowerBound = result.upperBound = totalValue(valuation);
    return result;
  }

  // Zero-valued items never matter; they are parked in bundle 0 afterwards.
  std::vector<int> positive;
  std::vector<int> zeros;
  for (const int g : orderByValue(valuation)) {
    (valuation[g].isZero() ? zeros : positive).push_back(g);
  }

  const auto lpt = lptPartition(valuation, nBundles);
  const Rational lptValue = minBundleValue(valuation, lpt);
  const Rational proportional = totalValue(valuation) / Rational(nBundles);

  // Uniform positive values: the answer is floor(count / n) copies.
  const bool uniform = !positive.empty() &&
                       std::all_of(positive.begin(), positive.end(), [&](int g) {
                         return valuation[g] == valuation[positive.front()];
                       });
  if (positive.size() < static_cast<std::size_t>(nBundles) || uniform) {
    result.witnessPartition = lpt;
    result.value = result.lowerBound = result.upperBound = lptValue;
    return result;
  }

  if (static_cast<int>(positive.size()) > options.maxItems || nBundles > options.maxBundles) {
    if (!options.boundOnlyOnCapacity) {
      throw CapacityError("exact MMS limited to " + std::to_string(options.maxItems) +
                          " valued items and " + std::to_string(options.maxBundles) +
                          " bundles");
    }
    result.exact = false;
    result.witnessPartition = lpt;
    result.value = result.lowerBound = lptValue;
    result.upperBound = proportional;
    return result;
  }

  std::vector<Rational> positiveValues;
  positiveValues.reserve(positive.size());
  for (const int g : positive) positiveValues.push_back(valuation[g]);
  const IntegerValuation ints = toIntegers(positiveValues);
  const std::int64_t total = std::accumulate(ints.weights.begin(), ints.weights.end(),
                                             std::int64_t{0});

  // LPT incumbent on the positive items, expressed as an assignment vector.
  std::vector<int> lptAssignment(positive.size());
  std::vector<std::int64_t> loads(nBundles, 0);
  for (std::size_t i = 0; i < positive.size(); ++i) {
    const auto j = std::min_element(loads.begin(), loads.end()) - loads.begin();
    loads[j] += ints.weights[i];
    lptAssignment[i] = static_cast<int>(j);
  }
  const std::int64_t incumbent = *std::min_element(loads.begin(), loads.end());

  BranchAndBound search(ints.weights, nBundles, incumbent, lptAssignment, total / nBundles,
                        options.maxNodes);
  const bool complete = search.run();
  result.nodes = search.nodes();

  std::vector<std::vector<int>> parts(nBundles);
  for (std::size_t i = 0; i < positive.size(); ++i) {
    parts[search.bestAssignment()[i]].push_back(positive[i]);
  }
  for (const int g : zeros) parts[0].push_back(g);
  result.witnessPartition = toBundles(parts);
  result.value = Rational(search.best(), 1) / Rational(ints.scale);

  if (!complete) {
    if (!options.boundOnlyOnCapacity) throw CapacityError("exact MMS search exceeded node budget");
    result.exact = false;
    result.lowerBound = result.value;
    result.upperBound = proportional;
    return result;
  }
  result.lowerBound = result.upperBound = result.value;
  return result;
}

MmsResult mmsBruteForce(std::span<const Rational> valuation, int nBundles) {
  checkArguments(valuation, nBundles);
  const int m = static_cast<int>(valuation.size());
  if (m > 12 || nBundles > 5) throw CapacityError("brute force limited to m <= 12, n <= 5");

  MmsResult result;
  if (m == 0) {
    result.witnessPartition.assign(nBundles, Bundle{});
    return result;
  }

  // Odometer over the labels of items 1..m-1; item 0 stays in bundle 0.
  std::vector<int> label(m, 0);
  std::vector<Rational> loads(nBundles);
  loads[0] = totalValue(valuation);
  std::vector<int> bestLabel = label;
  Rational best = nBundles == 1 ? loads[0] : Rational(0);
  std::uint64_t leaves = 0;

  while (true) {
    ++leaves;
    Rational low = loads[0];
    for (int j = 1; j < nBundles; ++j) low = min(low, loads[j]);
    if (low > best) {
      best = low;
      bestLabel = label;
    }
    int pos = m - 1;
    while (pos >= 1 && label[pos] == nBundles - 1) {
      loads[label[pos]] -= valuation[pos];
      label[pos] = 0;
      loads[0] += valuation[pos];
      --pos;
    }
    if (pos < 1) break;
    loads[label[pos]] -= valuation[pos];
    ++label[pos];
    loads[label[pos]] += valuation[pos];
  }

  std::vector<std::vector<int>> parts(nBundles);
  for (int g = 0; g < m; ++g) parts[bestLabel[g]].push_back(g);
  result.witnessPartition = toBundles(parts);
  result.value = result.lowerBound = result.upperBound = best;
  result.nodes = leaves;
  return result;
}

std::vector<Bundle> alphaMmsPartition(std::span<const Rational> valuation, int nBundles,
                                      const Rational& alpha, const MmsOptions& options) {
  if (alpha > Rational(1)) throw InputError("alpha-MMS partition requires alpha <= 1");
  return mmsExact(valuation, nBundles, options).witnessPartition;
}

MmsSolver exactSolver(MmsOptions options) {
  return [options](std::span<const Rational> valuation, int n) {
    return mmsExact(valuation, n, options);
  };
}

}  // namespace mmsonline
