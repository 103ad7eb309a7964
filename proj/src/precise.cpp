#include "mmsonline/precise.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>

namespace mmsonline::precise {
namespace {

using boost::multiprecision::cpp_int;

cpp_int big(std::int64_t v) { return cpp_int(v); }

cpp_int ipow(const cpp_int& base, std::int64_t exp) {
  return boost::multiprecision::pow(base, static_cast<unsigned>(exp));
}

void checkExponent(std::int64_t base, const Rational& exponent) {
  if (base < 1) throw std::domain_error("precise: base must be >= 1");
  if (exponent < Rational(0)) throw std::domain_error("precise: exponent must be >= 0");
  if (exponent.num() > 4096 || exponent.den() > 4096) {
    throw std::domain_error("precise: exponent " + exponent.str() + " has too large terms");
  }
}

}  // namespace

bool powLeq(std::int64_t base, const Rational& exponent, const Rational& rhs) {
  checkExponent(base, exponent);
  if (rhs <= Rational(0)) return false;
  // base^(p/q) <= a/b  <=>  base^p * b^q <= a^q
  const auto p = exponent.num();
  const auto q = exponent.den();
  return ipow(big(base), p) * ipow(big(rhs.den()), q) <= ipow(big(rhs.num()), q);
}

std::int64_t ceilPow(std::int64_t base, const Rational& exponent) {
  checkExponent(base, exponent);
  auto r = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(base),
                                                        exponent.toDouble())));
  if (r < 1) r = 1;
  while (r > 1 && powLeq(base, exponent, Rational(r - 1))) --r;
  while (!powLeq(base, exponent, Rational(r))) ++r;
  return r;
}

bool rootTermGeq(const Rational& x, std::int64_t base, const Rational& exponent,
                 const Rational& radicand) {
  checkExponent(base, exponent);
  if (radicand < Rational(0)) throw std::domain_error("precise: negative radicand");
  if (x <= Rational(0)) return true;
  if (radicand.isZero()) return false;
  // (a/b)^2 <= base^(2p/q) * c/d  <=>  (a^2 d)^q <= base^(2p) * (b^2 c)^q
  const auto p = exponent.num();
  const auto q = exponent.den();
  const cpp_int lhs = ipow(big(x.num()) * big(x.num()) * big(radicand.den()), q);
  const cpp_int rhs = ipow(big(base), 2 * p) *
                      ipow(big(x.den()) * big(x.den()) * big(radicand.num()), q);
  return lhs <= rhs;
}

int compareRootTerm(const Rational& x, std::int64_t base, const Rational& exponent,
                    const Rational& radicand) {
  checkExponent(base, exponent);
  if (radicand < Rational(0)) throw std::domain_error("precise: negative radicand");
  if (radicand.isZero() || x <= Rational(0)) {
    if (radicand.isZero()) return x < Rational(0) ? -1 : (x.isZero() ? 0 : 1);
    return -1;
  }
  const auto p = exponent.num();
  const auto q = exponent.den();
  const cpp_int lhs = ipow(big(x.num()) * big(x.num()) * big(radicand.den()), q);
  const cpp_int rhs = ipow(big(base), 2 * p) *
                      ipow(big(x.den()) * big(x.den()) * big(radicand.num()), q);
  return lhs < rhs ? -1 : (lhs == rhs ? 0 : 1);
}

double approxRootTerm(std::int64_t base, const Rational& exponent, const Rational& radicand) {
  return std::pow(static_cast<double>(base), exponent.toDouble()) *
         std::sqrt(radicand.toDouble());
}

std::int64_t floorOffsetRootTerm(const Rational& offset, std::int64_t base,
                                 const Rational& exponent, const Rational& radicand) {
  const double estimate = offset.toDouble() + approxRootTerm(base, exponent, radicand);
  auto f = static_cast<std::int64_t>(std::floor(estimate));
  while (!rootTermGeq(Rational(f) - offset, base, exponent, radicand)) --f;
  while (rootTermGeq(Rational(f + 1) - offset, base, exponent, radicand)) ++f;
  return f;
}

Rational rootTermLowerBound(std::int64_t base, const Rational& exponent, const Rational& radicand,
                            std::int64_t scale) {
  const double estimate = approxRootTerm(base, exponent, radicand) * static_cast<double>(scale);
  auto f = static_cast<std::int64_t>(std::floor(estimate));
  if (f < 0) f = 0;
  while (f > 0 && !rootTermGeq(Rational(f, scale), base, exponent, radicand)) --f;
  while (rootTermGeq(Rational(f + 1, scale), base, exponent, radicand)) ++f;
  return Rational(f, scale);
}

}  // namespace mmsonline::precise
