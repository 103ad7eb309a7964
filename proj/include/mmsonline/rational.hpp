#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mmsonline {

/// Exact fraction over 64-bit integers.
///
/// Always kept in canonical form (gcd(|num|, den) == 1, den > 0). Every
/// operation is carried out in 128-bit intermediates; a result that does not
/// fit back into 64 bits throws std::overflow_error instead of rounding.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den);

  /// Accepts "a/b", "a" and decimal literals such as "0.05" or "-1.5".
  static Rational parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool isZero() const { return num_ == 0; }
  bool isInteger() const { return den_ == 1; }

  /// Largest integer <= *this.
  std::int64_t floor() const;
  /// Smallest integer >= *this.
  std::int64_t ceil() const;

  double toDouble() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  /// Canonical "num/den" text, also used for integers ("3/1").
  std::string str() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

 private:
  static Rational fromWide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

inline Rational abs(const Rational& r) { return r < Rational{} ? -r : r; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace mmsonline

template <>
struct std::hash<mmsonline::Rational> {
  std::size_t operator()(const mmsonline::Rational& r) const noexcept {
    const auto h = std::hash<std::int64_t>{};
    return h(r.num()) * 1000003u ^ h(r.den());
  }
};
