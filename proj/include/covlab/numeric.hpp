#pragma once

// Exact arithmetic helpers: rationals, decimal parsing and rendering,
// extended (possibly infinite) values.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace covlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) {
  return static_cast<double>(q);
}

// Parses "12", "-3.25", ".5", "1e-3", "2.5E+2" and "p/q" (each side decimal)
// into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
  };
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  std::string_view s = trim(text);
  if (s.empty()) return fail();

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) return fail();
    return num / den;
  }

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  long scale = 0;  // value = digits * 10^(-scale)
  bool seen_point = false;
  bool seen_digit = false;
  size_t i = 0;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return fail();
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') return fail();
    std::string_view ex = s.substr(i + 1);
    if (ex.empty()) return fail();
    bool ex_neg = false;
    if (ex.front() == '+' || ex.front() == '-') {
      ex_neg = ex.front() == '-';
      ex.remove_prefix(1);
    }
    if (ex.empty() || ex.size() > 6) return fail();
    long e = 0;
    for (char c : ex) {
      if (c < '0' || c > '9') return fail();
      e = e * 10 + (c - '0');
    }
    scale += ex_neg ? e : -e;
  }
  // a leading 0 would make the Integer constructor read octal
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  Integer mantissa(digits);
  Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::labs(scale)));
  Rational value = scale >= 0 ? Rational(mantissa, ten_pow) : Rational(mantissa * ten_pow);
  return negative ? Rational(-value) : value;
}

// Renders exactly: integers as-is, terminating decimals in decimal notation,
// anything else as "p/q".
inline std::string to_string(const Rational& q) {
  Integer num = boost::multiprecision::numerator(q);
  Integer den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  Integer rest = den;
  unsigned twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return num.str() + "/" + den.str();
  unsigned places = std::max(twos, fives);
  Integer scaled = num * (boost::multiprecision::pow(Integer(10), places) / den);
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string body = scaled.str();
  if (body.size() <= places) body.insert(0, places - body.size() + 1, '0');
  body.insert(body.size() - places, ".");
  return negative ? "-" + body : body;
}

// A nonnegative rational or +infinity.
class Extended {
 public:
  Extended() = default;
  Extended(Rational value) : value_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  static Extended infinity() {
    Extended e;
    e.infinite_ = true;
    return e;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  const Rational& value() const {
    if (infinite_) throw std::logic_error("value() of infinite Extended");
    return value_;
  }
  double as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : to_double(value_);
  }
  std::string str() const { return infinite_ ? "inf" : to_string(value_); }

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend bool operator<(const Extended& a, const Extended& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const Extended& a, const Extended& b) { return !(b < a); }
  friend bool operator>(const Extended& a, const Extended& b) { return b < a; }
  friend bool operator>=(const Extended& a, const Extended& b) { return !(a < b); }

 private:
  bool infinite_ = false;
  Rational value_{0};
};

inline Extended parse_extended(std::string_view text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return Extended::infinity();
  return Extended(parse_rational(text));
}

// Ratio of two integer masses, compared exactly without building rationals.
// den == 0 with num > 0 is +infinity; 0/0 is not representable (callers skip it).
struct MassRatio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  bool infinite() const { return den == 0; }
  Extended extended() const {
    if (den == 0) return Extended::infinity();
    return Extended(Rational(num, den));
  }
  friend int compare(const MassRatio& a, const MassRatio& b) {
    if (a.infinite() || b.infinite()) return int(a.infinite()) - int(b.infinite());
    __int128 lhs = static_cast<__int128>(a.num) * b.den;
    __int128 rhs = static_cast<__int128>(b.num) * a.den;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
};

}  // namespace covlab
