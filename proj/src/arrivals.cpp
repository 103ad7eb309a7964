#include "mmsonline/arrivals.hpp"

#include <numeric>
#include <stdexcept>

namespace mmsonline {
namespace {

// Cumulative integer weights over a common denominator, so a single uniform
// integer draw picks a type with exactly the rational probability.
struct Sampler {
  std::vector<std::uint64_t> cumulative;
  std::uint64_t total = 0;

  explicit Sampler(const TypeDistribution& d) {
    const auto probs = d.byOriginalType();
    std::int64_t denom = 1;
    for (const auto& p : probs) {
      const std::int64_t g = std::gcd(denom, p.den());
      const __int128 l = static_cast<__int128>(denom / g) * p.den();
      if (l > (static_cast<__int128>(1) << 62)) {
        throw InputError("type distribution denominators too large to sample exactly");
      }
      denom = static_cast<std::int64_t>(l);
    }
    for (const auto& p : probs) {
      total += static_cast<std::uint64_t>(p.num() * (denom / p.den()));
      cumulative.push_back(total);
    }
  }

  int draw(Rng& rng) const {
    const std::uint64_t u = rng.below(total);
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
      if (u < cumulative[i]) return static_cast<int>(i);
    }
    return static_cast<int>(cumulative.size()) - 1;
  }
};

}  // namespace

ArrivalSource ArrivalSource::fixed(std::vector<int> types) {
  ArrivalSource s;
  s.kind_ = Kind::fixedSequence;
  s.fixed_ = std::move(types);
  return s;
}

ArrivalSource ArrivalSource::iid(const TypeDistribution& distribution, std::uint64_t seed) {
  ArrivalSource s;
  s.kind_ = Kind::iidSampler;
  s.distribution_ = distribution;
  s.rng_ = std::make_shared<Rng>(seed);
  return s;
}

ArrivalSource ArrivalSource::adaptive(Adaptive policy) {
  ArrivalSource s;
  s.kind_ = Kind::adaptiveAdversary;
  s.adaptive_ = std::move(policy);
  return s;
}

void ArrivalSource::enumerate(int k, int n,
                              const std::function<void(std::span<const int>)>& visit) {
  if (k < 1 || n < 0) throw InputError("enumerate needs k >= 1 and n >= 0");
  std::vector<int> seq(static_cast<std::size_t>(n), 0);
  while (true) {
    visit(seq);
    int pos = n - 1;
    while (pos >= 0 && seq[pos] == k - 1) seq[pos--] = 0;
    if (pos < 0) return;
    ++seq[pos];
  }
}

int ArrivalSource::next(int agent, std::span<const Grant> history) {
  switch (kind_) {
    case Kind::fixedSequence:
    case Kind::exhaustiveEnumerator:
      if (agent < 0 || agent >= static_cast<int>(fixed_.size())) {
        throw InputError("arrival sequence shorter than the number of agents");
      }
      return fixed_[agent];
    case Kind::iidSampler:
      return Sampler(distribution_).draw(*rng_);
    case Kind::adaptiveAdversary:
      return adaptive_(agent, history);
  }
  throw std::logic_error("unknown arrival kind");
}

std::vector<int> ArrivalSource::take(int n) {
  if (kind_ == Kind::adaptiveAdversary) {
    throw InputError("an adaptive source cannot be materialized in advance");
  }
  if (kind_ == Kind::iidSampler) {
    const Sampler sampler(distribution_);
    std::vector<int> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(sampler.draw(*rng_));
    return out;
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i) out.push_back(next(i, {}));
  return out;
}

std::vector<int> sampleArrivals(const TypeDistribution& distribution, int n, std::uint64_t seed) {
  return ArrivalSource::iid(distribution, seed).take(n);
}

}  // namespace mmsonline
