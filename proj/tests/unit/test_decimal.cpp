#include <gtest/gtest.h>

#include "evidx/decimal.hpp"

using evidx::Decimal;
using evidx::Rational;

namespace {

Decimal D(const char* s) { return *Decimal::parse(s); }

}  // namespace

TEST(Decimal, ParsesPlainAndScientific) {
  EXPECT_EQ(D("12.5").to_string(), "12.5");
  EXPECT_EQ(D("-0.70").to_string(), "-0.7");
  EXPECT_EQ(D("+3").to_string(), "3");
  EXPECT_EQ(D("1e3").to_string(), "1000");
  EXPECT_EQ(D("2.5E-2").to_string(), "0.025");
  EXPECT_EQ(D("0.000").to_string(), "0");
}

TEST(Decimal, CanonicalEquality) {
  EXPECT_EQ(D("0.70"), D("0.7"));
  EXPECT_EQ(D("20.0"), D("20"));
  EXPECT_TRUE(D("20.0").is_integer());
  EXPECT_NE(D("0.7"), D("0.71"));
  EXPECT_LT(D("-1"), D("0.5"));
  EXPECT_GT(D("100.01"), D("100"));
}

TEST(Decimal, RejectsGarbage) {
  EXPECT_FALSE(Decimal::parse(""));
  EXPECT_FALSE(Decimal::parse("abc"));
  EXPECT_FALSE(Decimal::parse("1,000"));
  EXPECT_FALSE(Decimal::parse("1.2.3"));
  EXPECT_FALSE(Decimal::parse("12345678901234567890"));
}

TEST(Decimal, LenientAcceptsThousandsSeparators) {
  EXPECT_EQ(Decimal::parse_lenient("5,417")->to_string(), "5417");
  EXPECT_EQ(Decimal::parse_lenient(" 1,323,052.5 ")->to_string(), "1323052.5");
  EXPECT_FALSE(Decimal::parse_lenient("n/a"));
}

TEST(Decimal, Addition) {
  EXPECT_EQ((D("0.1") + D("0.2")).to_string(), "0.3");
  EXPECT_EQ((D("184") + D("1323052")).to_string(), "1323236");
  EXPECT_EQ((-D("1.5")).to_string(), "-1.5");
}

TEST(Rational, ReducesAndNormalizesSign) {
  Rational r(10, -4);
  EXPECT_EQ(r.numerator(), -5);
  EXPECT_EQ(r.denominator(), 2);
  EXPECT_EQ(Rational(4599, 11).to_string(), "4599/11");
  EXPECT_EQ(Rational(40, 2).to_string(), "20");
}

TEST(Rational, TerminatingExpansion) {
  EXPECT_TRUE(Rational(1, 8).terminates());
  EXPECT_TRUE(Rational(3, 20).terminates());
  EXPECT_FALSE(Rational(1, 3).terminates());
  EXPECT_EQ(Rational(1, 8).to_decimal().to_string(), "0.125");
  EXPECT_EQ(Rational(2, 3).to_decimal(6).to_string(), "0.666667");
  EXPECT_EQ(Rational(4599, 11).to_decimal(2).to_string(), "418.09");
  EXPECT_EQ(Rational::from_decimal(D("2.5")), Rational(5, 2));
}

TEST(NumericallyEqual, TerminatingNeedsExactValue) {
  EXPECT_TRUE(evidx::numerically_equal(D("2.5"), Rational(5, 2)));
  EXPECT_TRUE(evidx::numerically_equal(D("2.50"), Rational(5, 2)));
  EXPECT_FALSE(evidx::numerically_equal(D("2.5"), Rational(51, 20)));
  EXPECT_FALSE(evidx::numerically_equal(D("3"), Rational(5, 2)));
}

TEST(NumericallyEqual, NonTerminatingUsesPredictionPrecision) {
  const Rational mean(4599, 11);  // 418.0909...
  EXPECT_TRUE(evidx::numerically_equal(D("418.09"), mean));
  EXPECT_TRUE(evidx::numerically_equal(D("418.091"), mean));
  EXPECT_TRUE(evidx::numerically_equal(D("418.090909"), mean));
  EXPECT_FALSE(evidx::numerically_equal(D("418.1"), mean));
  EXPECT_FALSE(evidx::numerically_equal(D("418"), mean));
  EXPECT_FALSE(evidx::numerically_equal(D("418.08"), mean));
}
