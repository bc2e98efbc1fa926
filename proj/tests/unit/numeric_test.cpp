#include <gtest/gtest.h>

#include <random>

#include "maxstrat/errors.hpp"
#include "maxstrat/numeric.hpp"

using maxstrat::ArithmeticError;
using maxstrat::EpsRational;
using maxstrat::ExtRational;
using maxstrat::Rational;

TEST(Rational, HeatingStepBound) {
  Rational r = Rational(15, 16) * 22 + Rational(19, 16) + 1;
  EXPECT_EQ(r, Rational(365, 16));
  EXPECT_EQ(r.str(), "365/16");
}

TEST(Rational, CoolingStepBound) {
  Rational r = -(Rational(15) * 18 + 14) / 16;
  EXPECT_EQ(r, Rational(-71, 4));
  EXPECT_EQ(r.str(), "-71/4");
}

TEST(Rational, AdditiveIdentity) {
  Rational a(-7, 3);
  EXPECT_EQ(a + 0, a);
}

TEST(Rational, LowestTerms) {
  Rational a(6, -4);
  EXPECT_EQ(a.numerator_str(), "-3");
  EXPECT_EQ(a.denominator_str(), "2");
  EXPECT_EQ(Rational::parse("10/4"), Rational(5, 2));
  EXPECT_EQ(Rational::parse("-71/4"), Rational(-71, 4));
  EXPECT_EQ(Rational::parse("0/9").str(), "0");
}

TEST(Rational, DivisionByZeroIsAnError) {
  EXPECT_THROW(Rational(1) / Rational(0), ArithmeticError);
  Rational a(3);
  EXPECT_THROW(a /= Rational(0), ArithmeticError);
  EXPECT_THROW(Rational(1, 0), ArithmeticError);
  EXPECT_THROW(Rational::parse("1/0"), ArithmeticError);
}

TEST(Rational, MalformedLiteral) {
  EXPECT_THROW(Rational::parse("1.5"), maxstrat::UsageError);
  EXPECT_THROW(Rational::parse(""), maxstrat::UsageError);
  EXPECT_THROW(Rational::parse("3/"), maxstrat::UsageError);
}

TEST(Rational, BigDenominatorsStayExact) {
  Rational r(1);
  for (int k = 0; k < 100; ++k) r = r * Rational(15, 16) + 1;
  Rational back = r;
  for (int k = 0; k < 100; ++k) back = (back - 1) / Rational(15, 16);
  EXPECT_EQ(back, Rational(1));
}

TEST(Rational, FieldAxiomsRandomized) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> num(-50, 50);
  std::uniform_int_distribution<long> den(1, 30);
  auto draw = [&] { return Rational(num(rng), den(rng)); };
  for (int trial = 0; trial < 500; ++trial) {
    Rational a = draw(), b = draw(), c = draw();
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a - a, Rational(0));
    if (!b.is_zero()) EXPECT_EQ((a / b) * b, a);
  }
}

TEST(ExtRational, Addition) {
  EXPECT_EQ(ExtRational(16) + ExtRational(1), ExtRational(17));
  EXPECT_EQ(ExtRational::neg_inf() + ExtRational(5), ExtRational::neg_inf());
  EXPECT_EQ(ExtRational::pos_inf() + ExtRational(-3), ExtRational::pos_inf());
  EXPECT_THROW(ExtRational::pos_inf() + ExtRational::neg_inf(), ArithmeticError);
  EXPECT_THROW(ExtRational::neg_inf() + ExtRational::pos_inf(), ArithmeticError);
}

TEST(ExtRational, TotalOrder) {
  ExtRational lo = ExtRational::neg_inf();
  ExtRational hi = ExtRational::pos_inf();
  ExtRational mid(Rational(-71, 4));
  EXPECT_LT(lo, mid);
  EXPECT_LT(mid, hi);
  EXPECT_LT(lo, hi);
  EXPECT_LT(ExtRational(-16), ExtRational(Rational(365, 16)));
  EXPECT_EQ(ExtRational::parse("-inf"), lo);
  EXPECT_EQ(ExtRational::parse("+inf"), hi);
  EXPECT_EQ(ExtRational::parse("365/16"), ExtRational(Rational(365, 16)));
  EXPECT_EQ(mid.str(), "-71/4");
  EXPECT_THROW((void)hi.value(), maxstrat::UsageError);
}

TEST(EpsRational, LexicographicOrder) {
  EpsRational a(Rational(3), Rational(-1));
  EpsRational b(Rational(3), Rational(0));
  EpsRational c(Rational(3), Rational(2));
  EXPECT_LT(a, b);
  EXPECT_LT(b, c);
  EXPECT_LT(c, EpsRational(Rational(4), Rational(-100)));
}

TEST(EpsRational, EmbeddingPreservesOrder) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> num(-40, 40);
  std::uniform_int_distribution<long> den(1, 12);
  for (int trial = 0; trial < 300; ++trial) {
    Rational x(num(rng), den(rng));
    Rational y(num(rng), den(rng));
    EXPECT_EQ(x < y, EpsRational(x) < EpsRational(y));
    EXPECT_EQ(x == y, EpsRational(x) == EpsRational(y));
  }
}

TEST(EpsRational, Instantiate) {
  EpsRational v(Rational(5), Rational(-2));
  EXPECT_EQ(v.instantiate(Rational(1, 4)), Rational(9, 2));
  EXPECT_EQ((v * Rational(2)).eps(), Rational(-4));
}
