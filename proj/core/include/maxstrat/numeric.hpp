#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace maxstrat {

/// Exact arbitrary-precision rational, always in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long numerator, long denominator);
  explicit Rational(mpq_class value);

  /// Parses `[-]digits[/digits]`. Throws UsageError on malformed input and
  /// ArithmeticError on a zero denominator.
  static Rational parse(std::string_view text);

  Rational operator+(const Rational& other) const;
  Rational operator-(const Rational& other) const;
  Rational operator*(const Rational& other) const;
  /// Throws ArithmeticError when `other` is zero.
  Rational operator/(const Rational& other) const;
  Rational operator-() const;

  Rational& operator+=(const Rational& other);
  Rational& operator-=(const Rational& other);
  Rational& operator*=(const Rational& other);
  Rational& operator/=(const Rational& other);

  bool operator==(const Rational& other) const { return value_ == other.value_; }
  std::strong_ordering operator<=>(const Rational& other) const;

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sgn(value_) == 0; }
  bool is_integer() const;
  Rational abs() const;

  std::string numerator_str() const;
  std::string denominator_str() const;
  /// `n` or `n/d`, with a leading `-` for negatives.
  std::string str() const;
  double to_double() const { return value_.get_d(); }
  std::size_t hash() const;

  const mpq_class& raw() const { return value_; }

 private:
  struct Canonical {};
  Rational(mpq_class value, Canonical) : value_(std::move(value)) {}

  mpq_class value_;
};

std::ostream& operator<<(std::ostream& out, const Rational& value);

/// Rational extended with -inf and +inf.
class ExtRational {
 public:
  enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

  ExtRational() : kind_(Kind::NegInf) {}
  ExtRational(Rational value)  // NOLINT(google-explicit-constructor)
      : kind_(Kind::Finite), value_(std::move(value)) {}
  ExtRational(long value) : ExtRational(Rational(value)) {}  // NOLINT

  static ExtRational neg_inf() { return ExtRational(Kind::NegInf); }
  static ExtRational pos_inf() { return ExtRational(Kind::PosInf); }

  /// Accepts rational literals plus `-inf`, `+inf` and `inf`.
  static ExtRational parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  /// Finite value; throws UsageError on an infinity.
  const Rational& value() const;

  /// Extended-real addition. +inf + -inf throws ArithmeticError.
  ExtRational operator+(const ExtRational& other) const;

  bool operator==(const ExtRational& other) const;
  std::strong_ordering operator<=>(const ExtRational& other) const;

  std::string str() const;
  std::size_t hash() const;

 private:
  explicit ExtRational(Kind kind) : kind_(kind) {}

  Kind kind_;
  Rational value_;
};

std::ostream& operator<<(std::ostream& out, const ExtRational& value);

/// `real + eps * ε` for a symbolic positive infinitesimal ε. Ordered
/// lexicographically, so `x < c` can be encoded as `x <= c - ε`.
class EpsRational {
 public:
  EpsRational() = default;
  EpsRational(Rational real)  // NOLINT(google-explicit-constructor)
      : real_(std::move(real)) {}
  EpsRational(long real) : real_(real) {}  // NOLINT(google-explicit-constructor)
  EpsRational(Rational real, Rational eps)
      : real_(std::move(real)), eps_(std::move(eps)) {}

  const Rational& real() const { return real_; }
  const Rational& eps() const { return eps_; }
  bool is_zero() const { return real_.is_zero() && eps_.is_zero(); }

  EpsRational operator+(const EpsRational& other) const {
    return {real_ + other.real_, eps_ + other.eps_};
  }
  EpsRational operator-(const EpsRational& other) const {
    return {real_ - other.real_, eps_ - other.eps_};
  }
  EpsRational operator-() const { return {-real_, -eps_}; }
  EpsRational operator*(const Rational& scale) const {
    return {real_ * scale, eps_ * scale};
  }
  EpsRational operator/(const Rational& scale) const {
    return {real_ / scale, eps_ / scale};
  }
  EpsRational& operator+=(const EpsRational& other);
  EpsRational& operator-=(const EpsRational& other);

  bool operator==(const EpsRational& other) const = default;
  std::strong_ordering operator<=>(const EpsRational& other) const;

  /// Value with ε instantiated to a concrete positive rational.
  Rational instantiate(const Rational& epsilon) const {
    return real_ + eps_ * epsilon;
  }

  std::string str() const;

 private:
  Rational real_;
  Rational eps_;
};

std::ostream& operator<<(std::ostream& out, const EpsRational& value);

}  // namespace maxstrat

template <>
struct std::hash<maxstrat::Rational> {
  std::size_t operator()(const maxstrat::Rational& value) const {
    return value.hash();
  }
};

template <>
struct std::hash<maxstrat::ExtRational> {
  std::size_t operator()(const maxstrat::ExtRational& value) const {
    return value.hash();
  }
};
