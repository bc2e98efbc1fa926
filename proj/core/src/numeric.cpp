#include "maxstrat/numeric.hpp"

#include <cctype>

#include "maxstrat/errors.hpp"

namespace maxstrat {

namespace {

bool all_digits(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Rational::Rational(long numerator, long denominator) {
  if (denominator == 0) throw ArithmeticError("rational with zero denominator");
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

Rational::Rational(mpq_class value) : value_(std::move(value)) {
  if (sgn(value_.get_den()) == 0) {
    throw ArithmeticError("rational with zero denominator");
  }
  value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) {
    throw UsageError("malformed rational literal '" + std::string(text) + "'");
  }
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) throw ArithmeticError("rational with zero denominator");
  if (negative) n = -n;
  mpq_class q(n, d);
  q.canonicalize();
  return Rational(std::move(q));
}

Rational Rational::operator+(const Rational& other) const {
  return Rational(mpq_class(value_ + other.value_), Canonical{});
}

Rational Rational::operator-(const Rational& other) const {
  return Rational(mpq_class(value_ - other.value_), Canonical{});
}

Rational Rational::operator*(const Rational& other) const {
  return Rational(mpq_class(value_ * other.value_), Canonical{});
}

Rational Rational::operator/(const Rational& other) const {
  if (other.is_zero()) throw ArithmeticError("division by zero");
  return Rational(mpq_class(value_ / other.value_), Canonical{});
}

Rational Rational::operator-() const {
  return Rational(mpq_class(-value_), Canonical{});
}

Rational& Rational::operator+=(const Rational& other) {
  value_ += other.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& other) {
  value_ -= other.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& other) {
  value_ *= other.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& other) {
  if (other.is_zero()) throw ArithmeticError("division by zero");
  value_ /= other.value_;
  return *this;
}

std::strong_ordering Rational::operator<=>(const Rational& other) const {
  int c = cmp(value_, other.value_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool Rational::is_integer() const { return value_.get_den() == 1; }

Rational Rational::abs() const { return sign() < 0 ? -*this : *this; }

std::string Rational::numerator_str() const { return value_.get_num().get_str(); }

std::string Rational::denominator_str() const {
  return value_.get_den().get_str();
}

std::string Rational::str() const { return value_.get_str(); }

std::size_t Rational::hash() const {
  std::size_t seed = std::hash<std::string>{}(value_.get_num().get_str(16));
  return mix(seed, std::hash<std::string>{}(value_.get_den().get_str(16)));
}

std::ostream& operator<<(std::ostream& out, const Rational& value) {
  return out << value.str();
}

ExtRational ExtRational::parse(std::string_view text) {
  if (text == "-inf") return neg_inf();
  if (text == "+inf" || text == "inf") return pos_inf();
  return ExtRational(Rational::parse(text));
}

const Rational& ExtRational::value() const {
  if (kind_ != Kind::Finite) throw UsageError("value() on an infinite bound");
  return value_;
}

ExtRational ExtRational::operator+(const ExtRational& other) const {
  if ((is_pos_inf() && other.is_neg_inf()) ||
      (is_neg_inf() && other.is_pos_inf())) {
    throw ArithmeticError("+inf + -inf is undefined");
  }
  if (!is_finite()) return *this;
  if (!other.is_finite()) return other;
  return ExtRational(value_ + other.value_);
}

bool ExtRational::operator==(const ExtRational& other) const {
  if (kind_ != other.kind_) return false;
  return kind_ != Kind::Finite || value_ == other.value_;
}

std::strong_ordering ExtRational::operator<=>(const ExtRational& other) const {
  if (kind_ != other.kind_) {
    return static_cast<int>(kind_) <=> static_cast<int>(other.kind_);
  }
  if (kind_ != Kind::Finite) return std::strong_ordering::equal;
  return value_ <=> other.value_;
}

std::string ExtRational::str() const {
  switch (kind_) {
    case Kind::NegInf:
      return "-inf";
    case Kind::PosInf:
      return "+inf";
    case Kind::Finite:
      break;
  }
  return value_.str();
}

std::size_t ExtRational::hash() const {
  return mix(static_cast<std::size_t>(kind_), is_finite() ? value_.hash() : 0);
}

std::ostream& operator<<(std::ostream& out, const ExtRational& value) {
  return out << value.str();
}

EpsRational& EpsRational::operator+=(const EpsRational& other) {
  real_ += other.real_;
  eps_ += other.eps_;
  return *this;
}

EpsRational& EpsRational::operator-=(const EpsRational& other) {
  real_ -= other.real_;
  eps_ -= other.eps_;
  return *this;
}

std::strong_ordering EpsRational::operator<=>(const EpsRational& other) const {
  if (auto c = real_ <=> other.real_; c != 0) return c;
  return eps_ <=> other.eps_;
}

std::string EpsRational::str() const {
  if (eps_.is_zero()) return real_.str();
  std::string out = real_.str();
  out += eps_.sign() < 0 ? " - " : " + ";
  out += eps_.abs().str();
  out += "e";
  return out;
}

std::ostream& operator<<(std::ostream& out, const EpsRational& value) {
  return out << value.str();
}

}  // namespace maxstrat
