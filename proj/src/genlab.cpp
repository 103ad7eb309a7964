#include "mmsonline/genlab.hpp"

#include <algorithm>
#include <set>

#include "mmsonline/rng.hpp"

namespace mmsonline {

Valuation Example1::secondType(const Bundle& firstGrant) const {
  Valuation v(instance.mItems, Rational(0));
  int liked = 0;
  for (const int g : firstGrant) {
    if (g < 0 || g >= instance.mItems) throw InputError("grant item out of range");
    if (liked < 2) {
      v[g] = 1;
      ++liked;
    }
  }
  for (int g = 0; g < instance.mItems && liked < 2; ++g) {
    if (v[g].isZero()) {
      v[g] = 1;
      ++liked;
    }
  }
  return v;
}

Instance Example1::withSecondType(const Bundle& firstGrant) const {
  Instance out = instance;
  out.typeValues.push_back(secondType(firstGrant));
  out.typeNames.push_back("revealed");
  return out;
}

Example1 genExample1(int m) {
  if (m < 2 || m % 2 != 0) throw InputError("example 1 needs an even m >= 2");
  Example1 e;
  e.instance.nAgents = 2;
  e.instance.mItems = m;
  e.instance.typeValues.push_back(Valuation(m, Rational(1)));
  e.instance.typeNames.push_back("all-ones");
  return e;
}

Instance genAdvCounterexample(int n, const Rational& epsilon) {
  if (n < 1) throw InputError("n must be positive");
  if (epsilon <= Rational(0) || epsilon >= Rational(1, 4 * n)) {
    throw InputError("epsilon must lie in (0, 1/(4n))");
  }
  Instance inst;
  inst.nAgents = n;
  inst.mItems = 3 * n;
  Valuation big(3 * n, Rational(0));
  Valuation bundler(3 * n, Rational(0));
  for (int g = 0; g < 2 * n; ++g) big[g] = Rational(1, 2) - epsilon;
  for (int g = 2 * n; g < 3 * n; ++g) {
    big[g] = 2 * epsilon;
    bundler[g] = Rational(1, n);
  }
  for (int g = 0; g < n - 1; ++g) bundler[g] = 1;
  inst.typeValues = {big, bundler};
  inst.typeNames = {"pairs-plus-crumb", "bundler"};
  return inst;
}

std::vector<Bundle> advCounterexampleBags(int n) {
  std::vector<Bundle> bags;
  for (int g = 0; g < n - 1; ++g) bags.push_back(Bundle{g});
  std::vector<int> small;
  for (int g = 2 * n; g < 3 * n; ++g) small.push_back(g);
  bags.emplace_back(std::move(small));
  return bags;
}

LowerBoundInstance genLowerBound(int k, int n) {
  if (k < 16) throw InputError("the lower-bound construction needs k >= 16");
  if (n < 2 || n % 2 != 0) throw InputError("the lower-bound construction needs an even n >= 2");
  LowerBoundInstance lb;
  lb.k = k;
  lb.n = n;
  int mu1 = 0;
  while (4 * (mu1 + 1) * (mu1 + 1) <= k) ++mu1;  // floor(sqrt(k) / 2)
  lb.mu1 = mu1;
  const int m = n * mu1;
  lb.instance.nAgents = n;
  lb.instance.mItems = m;

  auto add = [&](Valuation v, LowerBoundInstance::TypeInfo info, std::string name) {
    lb.instance.typeValues.push_back(std::move(v));
    lb.catalog.push_back(info);
    lb.instance.typeNames.push_back(std::move(name));
  };
  auto mark = [&](Valuation& v, int r, int half) {
    // half < 0 marks the whole interval, otherwise its first (0) or second (1) half
    const int lo = r * n + (half == 1 ? n / 2 : 0);
    const int hi = half < 0 ? (r + 1) * n : lo + n / 2;
    for (int g = lo; g < hi; ++g) v[g] = 1;
  };

  add(Valuation(m, Rational(1)), {LowerBoundInstance::Role::allOnes}, "all-ones");
  for (int r = 0; r < mu1; ++r) {
    Valuation v(m, Rational(0));
    mark(v, r, -1);
    add(std::move(v), {LowerBoundInstance::Role::interval, r}, "interval-" + std::to_string(r));
  }
  for (int l = 0; l < mu1; ++l) {
    for (int r = l + 1; r < mu1; ++r) {
      for (int h = 0; h < 4; ++h) {
        Valuation v(m, Rational(0));
        mark(v, l, h / 2);
        mark(v, r, h % 2);
        add(std::move(v), {LowerBoundInstance::Role::pair, l, r, h},
            "pair-" + std::to_string(l) + "-" + std::to_string(r) + "-" + std::to_string(h));
      }
    }
  }
  while (lb.instance.kTypes() < k) {
    add(Valuation(m, Rational(1)), {LowerBoundInstance::Role::filler}, "filler");
  }
  return lb;
}

Instance genTightnessHalf(int k, int n, const Rational& epsilon) {
  if (k < 1 || n < 1) throw InputError("k and n must be positive");
  if (epsilon <= Rational(0) || epsilon >= Rational(1)) throw InputError("epsilon must lie in (0, 1)");
  Instance inst;
  inst.nAgents = n;
  inst.mItems = 2 * n;
  for (int i = 0; i < k; ++i) {
    Valuation v(2 * n, Rational(1, 2));
    if (i > 0) {
      const Rational shift = epsilon / Rational(2 * (i + 1));
      v[2 * n - 2] = Rational(1, 2) + shift;
      v[2 * n - 1] = Rational(1, 2) - shift;
    }
    inst.typeValues.push_back(std::move(v));
    inst.typeNames.push_back("type-" + std::to_string(i + 1));
  }
  return inst;
}

NormalizedInstance certifiedTightnessHalf(int k, int n, const Rational& epsilon) {
  Instance inst = genTightnessHalf(k, n, epsilon);
  std::vector<Bundle> pairs;
  for (int j = 0; j < n; ++j) pairs.push_back(Bundle{2 * j, 2 * j + 1});
  return NormalizedInstance::fromCertified(std::move(inst),
                                           std::vector<std::vector<Bundle>>(k, pairs));
}

NormalizedInstance certifiedUnitInstance(const Instance& instance) {
  std::vector<std::vector<Bundle>> witnesses;
  for (int i = 0; i < instance.kTypes(); ++i) {
    std::vector<Bundle> parts;
    std::vector<int> zeros;
    for (int g = 0; g < instance.mItems; ++g) {
      const Rational& x = instance.typeValues[i][g];
      if (x == Rational(1)) {
        parts.push_back(Bundle{g});
      } else if (x.isZero()) {
        zeros.push_back(g);
      } else {
        throw InputError("unit instance values must be 0 or 1");
      }
    }
    if (static_cast<int>(parts.size()) != instance.nAgents) {
      throw InputError("every type must value exactly n items");
    }
    std::vector<int> last = parts.back().items();
    last.insert(last.end(), zeros.begin(), zeros.end());
    parts.back() = Bundle(std::move(last));
    witnesses.push_back(std::move(parts));
  }
  return NormalizedInstance::fromCertified(instance, std::move(witnesses));
}

TightnessPk genTightnessPk(int k, int n, const Rational& pk) {
  if (k < 3) throw InputError("tightness construction needs k >= 3");
  if (n % k != 0) throw InputError("tightness construction needs k | n");
  const int reduced = n / k;
  if (reduced < k - 2 || reduced < 1) throw InputError("tightness construction needs n/k >= k - 2");
  if (pk <= Rational(0) || pk > Rational(1, 2 * (k - 1))) {
    throw InputError("pk must lie in (0, 1/(2(k-1))]");
  }
  TightnessPk out;
  out.universalItems = n - reduced;
  out.reducedAgents = reduced;
  const int m = n + reduced;
  Instance& inst = out.instance;
  inst.nAgents = n;
  inst.mItems = m;
  const int c = out.universalItems;
  for (int i = 0; i < k; ++i) {
    Valuation v(m, Rational(0));
    for (int g = 0; g < c; ++g) v[g] = 1;
    if (i < k - 1) {
      // first n'-1 reduced items plus reduced item n'-1+i (1-based type index i+1)
      for (int g = 0; g < reduced - 1; ++g) v[c + g] = 1;
      v[c + reduced - 1 + i] = 1;
    } else {
      for (int g = reduced; g < 2 * reduced; ++g) v[c + g] = 1;
    }
    inst.typeValues.push_back(std::move(v));
    inst.typeNames.push_back("type-" + std::to_string(i + 1));
  }
  std::vector<Rational> probs(k, Rational(1, k - 1));
  probs[k - 2] = Rational(1, k - 1) - pk;
  probs[k - 1] = pk;
  out.distribution = TypeDistribution::fromProbabilities(probs);
  return out;
}

Instance genRandom(int n, int m, int k, const ValueModel& model, std::uint64_t seed) {
  if (n < 1 || m < 1 || k < 1) throw InputError("n, m and k must be positive");
  if (model.kind == ValueModel::Kind::binaryDensity &&
      (model.density < Rational(0) || model.density > Rational(1))) {
    throw InputError("binary density must lie in [0, 1]");
  }
  Rng rng(seed);
  Instance inst;
  inst.nAgents = n;
  inst.mItems = m;
  for (int i = 0; i < k; ++i) {
    Valuation v(m);
    for (int g = 0; g < m; ++g) {
      switch (model.kind) {
        case ValueModel::Kind::uniform: {
          const auto a = rng.between(1, 60);
          v[g] = Rational(a, rng.between(1, 6));
          break;
        }
        case ValueModel::Kind::binaryDensity:
          v[g] = rng.bernoulli(model.density) ? 1 : 0;
          break;
        case ValueModel::Kind::clustered: {
          const bool home = static_cast<long long>(g) * k / m == i;
          v[g] = home ? rng.between(10, 20) : rng.between(0, 3);
          break;
        }
      }
    }
    inst.typeValues.push_back(std::move(v));
    inst.typeNames.push_back("type-" + std::to_string(i + 1));
  }
  return inst;
}

namespace {

// Uniform composition of `total` into `parts` positive integers.
std::vector<std::int64_t> composition(Rng& rng, std::int64_t total, int parts) {
  std::set<std::int64_t> cuts;
  while (static_cast<int>(cuts.size()) < parts - 1) cuts.insert(rng.between(1, total - 1));
  std::vector<std::int64_t> out;
  std::int64_t prev = 0;
  for (const auto c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(total - prev);
  return out;
}

}  // namespace

NormalizedInstance genPlanted(int n, int k, const PlantedOptions& options, std::uint64_t seed) {
  const int s = options.itemsPerBundle;
  const std::int64_t d = options.denominator;
  if (n < 1 || k < 1 || s < 1) throw InputError("n, k and itemsPerBundle must be positive");
  if (d < s) throw InputError("denominator must be at least itemsPerBundle");
  if (!options.valueCap.empty() && static_cast<int>(options.valueCap.size()) != k) {
    throw InputError("valueCap needs one entry per type");
  }
  const int m = n * s;
  Rng rng(seed);
  Instance inst;
  inst.nAgents = n;
  inst.mItems = m;
  std::vector<std::vector<Bundle>> witnesses;
  for (int i = 0; i < k; ++i) {
    std::optional<Rational> cap;
    if (!options.valueCap.empty()) cap = options.valueCap[i];
    if (cap && *cap * Rational(s) <= Rational(1)) {
      throw InputError("value cap leaves no composition of 1 into " + std::to_string(s) + " parts");
    }
    std::vector<int> order(m);
    for (int g = 0; g < m; ++g) order[g] = g;
    rng.shuffle(order.begin(), order.end());
    Valuation v(m);
    std::vector<Bundle> partition;
    for (int b = 0; b < n; ++b) {
      std::vector<std::int64_t> parts;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 100000) throw InputError("value cap too tight for planted compositions");
        parts = composition(rng, d, s);
        if (!cap) break;
        const bool ok = std::all_of(parts.begin(), parts.end(),
                                    [&](std::int64_t p) { return Rational(p, d) < *cap; });
        if (ok) break;
      }
      std::vector<int> members;
      for (int j = 0; j < s; ++j) {
        const int g = order[b * s + j];
        v[g] = Rational(parts[j], d);
        members.push_back(g);
      }
      partition.emplace_back(std::move(members));
    }
    inst.typeValues.push_back(std::move(v));
    inst.typeNames.push_back("type-" + std::to_string(i + 1));
    witnesses.push_back(std::move(partition));
  }
  return NormalizedInstance::fromCertified(std::move(inst), std::move(witnesses));
}

}  // namespace mmsonline
