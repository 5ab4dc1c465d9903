#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "ratdial/error.hpp"

namespace ratdial {

/// Arbitrary-precision rational number in canonical form: reduced to lowest
/// terms with a strictly positive denominator. Every probability, measure
/// and opinion in the library is one of these; there is no floating point
/// anywhere in the model.
class Rational {
 public:
  Rational() : value_(0) {}
  Rational(long n) : value_(n) {}  // NOLINT: implicit by design
  Rational(long num, long den) {
    if (den == 0) throw Error("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
  }
  explicit Rational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }

  /// Parses "3/4", "-2", or an exact decimal such as "0.25". Any finite
  /// decimal converts exactly; malformed numerals throw ParseError.
  static Rational parse(std::string_view text);

  const mpq_class& raw() const { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }

  bool is_zero() const { return sgn(value_) == 0; }
  bool is_one() const { return value_ == 1; }
  bool is_certain() const { return is_zero() || is_one(); }
  bool in_unit_interval() const { return sgn(value_) >= 0 && value_ <= 1; }
  int sign() const { return sgn(value_); }

  /// Reduced-fraction text, "num/den" or just "num" for integers.
  std::string str() const {
    if (value_.get_den() == 1) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
  }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw Error("rational division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.value_, b.value_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  mpq_class value_;
};

inline Rational Rational::parse(std::string_view text) {
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!text.empty() && is_ws(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_ws(text.back())) text.remove_suffix(1);
  auto fail = [&] {
    throw ParseError("malformed rational '" + std::string(text) + "'");
  };
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
  std::size_t digits_start = i;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
  if (i == digits_start) fail();

  if (i == text.size()) {
    return Rational(mpq_class(std::string(text), 10));
  }
  if (text[i] == '/') {
    std::size_t den_start = ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i == den_start || i != text.size()) fail();
    mpq_class v(std::string(text), 10);
    if (v.get_den() == 0)
      throw ParseError("zero denominator in '" + std::string(text) + "'");
    v.canonicalize();
    return Rational(std::move(v));
  }
  if (text[i] == '.') {
    std::size_t frac_start = ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i == frac_start || i != text.size()) fail();
    // a.b = ab / 10^|b|, exactly.
    std::string digits(text.substr(0, frac_start - 1));
    digits += text.substr(frac_start);
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, text.size() - frac_start);
    mpq_class v(num, den);
    v.canonicalize();
    return Rational(std::move(v));
  }
  fail();
  return Rational();  // unreachable
}

}  // namespace ratdial
