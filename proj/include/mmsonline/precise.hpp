#pragma once

#include <cstdint>

#include "mmsonline/rational.hpp"

// Exact decisions about quantities of the form base^e * sqrt(r) with a
// rational exponent e. Every comparison is reduced to integer powers and
// settled with arbitrary-precision integers, so floors and ceilings of these
// irrational thresholds come out the same on every platform.
namespace mmsonline::precise {

/// base^exponent <= rhs, with base >= 1 and exponent >= 0.
bool powLeq(std::int64_t base, const Rational& exponent, const Rational& rhs);

/// Smallest integer r with r >= base^exponent.
std::int64_t ceilPow(std::int64_t base, const Rational& exponent);

/// x <= base^exponent * sqrt(radicand).
bool rootTermGeq(const Rational& x, std::int64_t base, const Rational& exponent,
                 const Rational& radicand);

/// Sign of x - base^exponent * sqrt(radicand), decided exactly.
int compareRootTerm(const Rational& x, std::int64_t base, const Rational& exponent,
                    const Rational& radicand);

/// floor(offset + base^exponent * sqrt(radicand)).
std::int64_t floorOffsetRootTerm(const Rational& offset, std::int64_t base,
                                 const Rational& exponent, const Rational& radicand);

/// floor(scale * base^exponent * sqrt(radicand)) / scale, a certified lower bound.
Rational rootTermLowerBound(std::int64_t base, const Rational& exponent, const Rational& radicand,
                            std::int64_t scale = 1 << 20);

/// Floating-point estimate, for reporting only.
double approxRootTerm(std::int64_t base, const Rational& exponent, const Rational& radicand);

}  // namespace mmsonline::precise
