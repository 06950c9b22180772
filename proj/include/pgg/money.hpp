#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "pgg/error.hpp"

namespace pgg {

namespace detail {

using wide = __int128;

inline wide gcd_wide(wide a, wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline std::int64_t narrow(wide v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorCode::ArithmeticOverflow, "rational component exceeds 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

/// Exact rational number, always kept in lowest terms with a positive
/// denominator. Intermediates are computed in 128 bits; a result that does
/// not fit back into 64 bits throws ArithmeticOverflow instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;

  Rational(std::int64_t numerator, std::int64_t denominator = 1) {
    if (denominator == 0) throw Error(ErrorCode::DivisionByZero, "zero denominator");
    assign(numerator, denominator);
  }

  /// Accepts integers ("2"), decimals ("1.6", "-0.05") and fractions ("8/5").
  static Rational parse(std::string_view text) {
    auto bad = [&] {
      return Error(ErrorCode::InvalidArgument, "not a rational: '" + std::string(text) + "'");
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      Rational n = parse(text.substr(0, slash));
      Rational d = parse(text.substr(slash + 1));
      if (n.den() != 1 || d.den() != 1) throw bad();
      return Rational(n.num(), d.num());
    }
    if (text.empty()) throw bad();
    bool negative = false;
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+') {
      negative = text[0] == '-';
      ++i;
    }
    detail::wide num = 0;
    detail::wide den = 1;
    bool seen_digit = false;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c == '.' && !seen_point) {
        seen_point = true;
        continue;
      }
      if (c < '0' || c > '9') throw bad();
      seen_digit = true;
      num = num * 10 + (c - '0');
      if (seen_point) den *= 10;
      if (num > std::numeric_limits<std::int64_t>::max() ||
          den > std::numeric_limits<std::int64_t>::max()) {
        throw Error(ErrorCode::ArithmeticOverflow, "literal too long: '" + std::string(text) + "'");
      }
    }
    if (!seen_digit) throw bad();
    Rational r;
    r.assign_wide(negative ? -num : num, den);
    return r;
  }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }

  constexpr bool is_zero() const noexcept { return num_ == 0; }
  constexpr bool is_negative() const noexcept { return num_ < 0; }
  constexpr bool is_integer() const noexcept { return den_ == 1; }

  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    Rational r;
    r.assign_wide(detail::wide(a.num_) * b.den_ + detail::wide(b.num_) * a.den_,
                  detail::wide(a.den_) * b.den_);
    return r;
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    Rational r;
    r.assign_wide(detail::wide(a.num_) * b.den_ - detail::wide(b.num_) * a.den_,
                  detail::wide(a.den_) * b.den_);
    return r;
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    Rational r;
    r.assign_wide(detail::wide(a.num_) * b.num_, detail::wide(a.den_) * b.den_);
    return r;
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(ErrorCode::DivisionByZero, "division by zero rational");
    Rational r;
    r.assign_wide(detail::wide(a.num_) * b.den_, detail::wide(a.den_) * b.num_);
    return r;
  }
  Rational operator-() const {
    Rational r;
    r.assign_wide(-detail::wide(num_), den_);
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return detail::wide(a.num_) * b.den_ <=> detail::wide(b.num_) * a.den_;
  }

  /// "8/5", or "3" when the value is an integer.
  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

 private:
  void assign(std::int64_t n, std::int64_t d) { assign_wide(n, d); }

  void assign_wide(detail::wide n, detail::wide d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    detail::wide g = detail::gcd_wide(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n == 0) d = 1;
    num_ = detail::narrow(n);
    den_ = detail::narrow(d);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// A decimal rendering and whether it is the exact value.
struct Rendered {
  std::string text;
  bool exact = true;
};

/// Round `value` to `digits` fraction digits, half away from zero.
inline Rendered render_decimal(const Rational& value, int digits) {
  detail::wide scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  detail::wide scaled_num = detail::wide(value.num()) * scale;
  detail::wide den = value.den();
  bool negative = scaled_num < 0;
  detail::wide mag = negative ? -scaled_num : scaled_num;
  detail::wide q = mag / den;
  detail::wide rem = mag % den;
  bool exact = rem == 0;
  if (rem * 2 >= den && !exact) ++q;
  detail::wide int_part = q / scale;
  detail::wide frac_part = q % scale;

  std::string text = std::to_string(static_cast<long long>(int_part));
  if (digits > 0) {
    std::string frac = std::to_string(static_cast<long long>(frac_part));
    text += '.';
    text.append(static_cast<std::size_t>(digits) - frac.size(), '0');
    text += frac;
  }
  if (negative && q != 0) text.insert(text.begin(), '-');
  return {text, exact};
}

/// Currency amount in euros, exact. Arithmetic never rounds; only
/// rendering does, and `render` reports when it had to.
class Money {
 public:
  constexpr Money() = default;
  explicit Money(Rational euros) : value_(euros) {}

  static Money from_cents(std::int64_t cents) { return Money(Rational(cents, 100)); }
  static Money from_milli(std::int64_t milli) { return Money(Rational(milli, 1000)); }
  static Money euros(std::int64_t whole) { return Money(Rational(whole)); }
  /// Decimal or fractional euro amount, e.g. "0.50", "1", "1/3".
  static Money parse(std::string_view text) { return Money(Rational::parse(text)); }

  const Rational& value() const noexcept { return value_; }
  bool is_zero() const noexcept { return value_.is_zero(); }
  bool is_negative() const noexcept { return value_.is_negative(); }

  std::optional<std::int64_t> exact_cents() const { return exact_units(100); }
  std::optional<std::int64_t> exact_milli() const { return exact_units(1000); }

  std::int64_t to_cents() const {
    if (auto c = exact_cents()) return *c;
    throw Error(ErrorCode::NotRepresentable, value_.to_string() + " EUR is not a whole number of cents");
  }
  std::int64_t to_milli() const {
    if (auto m = exact_milli()) return *m;
    throw Error(ErrorCode::NotRepresentable, value_.to_string() + " EUR is not a whole number of milli-euros");
  }

  Rendered render(int digits = 2) const { return render_decimal(value_, digits); }
  std::string to_string() const { return render(2).text; }

  friend Money operator+(const Money& a, const Money& b) { return Money(a.value_ + b.value_); }
  friend Money operator-(const Money& a, const Money& b) { return Money(a.value_ - b.value_); }
  friend Money operator*(const Money& a, const Rational& r) { return Money(a.value_ * r); }
  friend Money operator*(const Rational& r, const Money& a) { return Money(a.value_ * r); }
  friend Money operator/(const Money& a, std::int64_t n) {
    if (n <= 0) throw Error(ErrorCode::InvalidArgument, "money divided by non-positive integer");
    return Money(a.value_ / Rational(n));
  }
  Money& operator+=(const Money& o) { return *this = *this + o; }
  Money& operator-=(const Money& o) { return *this = *this - o; }

  friend bool operator==(const Money&, const Money&) = default;
  friend std::strong_ordering operator<=>(const Money& a, const Money& b) {
    return a.value_ <=> b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Money& m) {
    return os << m.to_string() << " EUR";
  }

 private:
  std::optional<std::int64_t> exact_units(std::int64_t per_euro) const {
    Rational scaled = value_ * Rational(per_euro);
    if (!scaled.is_integer()) return std::nullopt;
    return scaled.num();
  }

  Rational value_;
};

}  // namespace pgg
