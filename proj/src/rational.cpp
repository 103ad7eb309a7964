#include "mmsonline/rational.hpp"

#include <charconv>
#include <limits>
#include <ostream>

namespace mmsonline {
namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(i128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t parseInt(std::string_view text) {
  std::int64_t v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  *this = fromWide(num, den);
}

Rational Rational::fromWide(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits64(num) || !fits64(den)) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parseInt(text.substr(0, slash)), parseInt(text.substr(slash + 1)));
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view intPart = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    bool negative = false;
    if (!intPart.empty() && (intPart.front() == '-' || intPart.front() == '+')) {
      negative = intPart.front() == '-';
      intPart.remove_prefix(1);
    }
    if (frac.size() > 18) throw std::invalid_argument("too many decimals: " + std::string(text));
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const std::int64_t whole = intPart.empty() ? 0 : parseInt(intPart);
    const std::int64_t part = frac.empty() ? 0 : parseInt(frac);
    if (whole < 0 || part < 0) throw std::invalid_argument("malformed decimal: " + std::string(text));
    Rational r = Rational(whole) + Rational(part, scale);
    return negative ? -r : r;
  }
  return Rational(parseInt(text));
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::int64_t Rational::ceil() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::operator-() const { return fromWide(-static_cast<i128>(num_), den_); }

Rational& Rational::operator+=(const Rational& rhs) {
  if (den_ == rhs.den_) {
    *this = fromWide(static_cast<i128>(num_) + rhs.num_, den_);
  } else {
    *this = fromWide(static_cast<i128>(num_) * rhs.den_ + static_cast<i128>(rhs.num_) * den_,
                     static_cast<i128>(den_) * rhs.den_);
  }
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
  *this = fromWide(static_cast<i128>(num_) * rhs.num_, static_cast<i128>(den_) * rhs.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.num_ == 0) throw std::domain_error("division by zero rational");
  *this = fromWide(static_cast<i128>(num_) * rhs.den_, static_cast<i128>(den_) * rhs.num_);
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  if (r.den() == 1) return os << r.num();
  return os << r.num() << '/' << r.den();
}

}  // namespace mmsonline
