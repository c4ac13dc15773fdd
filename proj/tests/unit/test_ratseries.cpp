#include <gtest/gtest.h>

#include <conigap/ratseries.hpp>

using namespace conigap;

namespace {

Series x_poly(std::vector<Rational> c, int order) {
  c.resize(static_cast<std::size_t>(order));
  return Series("x", 0, std::move(c), order);
}

Series x_series(int order) { return Series::monomial("x", 1, 1, order); }

} // namespace

TEST(Arith, DifferenceOfSquares) {
  Series a = x_poly({1, 1}, 8), b = x_poly({1, -1}, 8);
  EXPECT_EQ(a * b, x_poly({1, 0, -1}, 8));
  EXPECT_EQ(arith(a, b, ArithKind::mul), x_poly({1, 0, -1}, 8));
}

TEST(Arith, GeometricSeries) {
  Series r = Series::constant("x", 1, 10) / x_poly({1, -1}, 10);
  for (int e = 0; e < 10; ++e) EXPECT_EQ(r[e], 1);
}

TEST(Arith, DivideByLeadingMonomial) {
  Series Q("y", 0, {0, 1, -6, 63}, 4);
  Series y = Series::monomial("y", 1, 1, 4);
  Series r = Q / y;
  EXPECT_EQ(r[0], 1);
  EXPECT_EQ(r[1], -6);
  EXPECT_EQ(r[2], 63);
  EXPECT_EQ(r.order(), 3);
}

TEST(Arith, Errors) {
  EXPECT_THROW(x_series(5) + Series::monomial("y", 1, 1, 5), VariableMismatch);
  EXPECT_THROW(x_series(5) / Series::zero("x", 5), DivisionByZeroSeries);
  EXPECT_THROW(x_series(5)[5], TruncationExceeded);
}

TEST(Arith, LaurentQuotientOrder) {
  // 1/(x + x^2) = x^{-1} - 1 + x - ...
  Series d("x", 1, {1, 1}, 6);
  Series r = Series::constant("x", 1, 6) / d;
  EXPECT_EQ(r.offset(), -1);
  EXPECT_EQ(r[-1], 1);
  EXPECT_EQ(r[0], -1);
  EXPECT_EQ(r[1], 1);
  EXPECT_EQ(r.order(), 4);
}

TEST(Compose, Squaring) {
  Series outer = Series::monomial("x", 2, 1, 8);
  Series inner = x_poly({0, 1, 1}, 8);
  EXPECT_EQ(compose(outer, inner), x_poly({0, 0, 1, 2, 1}, 8));
}

TEST(Compose, IdentityOuter) {
  Series s = x_poly({0, 3, frac(-1, 2), 7}, 8);
  EXPECT_TRUE(compose(x_series(8), s).agrees_with(s));
}

TEST(Compose, RejectsConstantTerm) {
  EXPECT_THROW(compose(x_series(5), x_poly({1, 1}, 5)), CompositionDomain);
}

TEST(Revert, Identity) { EXPECT_TRUE(revert(x_series(8)).agrees_with(x_series(8))); }

TEST(Revert, CatalanNumbers) {
  Series r = revert(x_poly({0, 1, -1}, 8));
  const long catalan[] = {1, 1, 2, 5, 14, 42, 132};
  for (int e = 1; e < 8; ++e) EXPECT_EQ(r[e], catalan[e - 1]) << "e=" << e;
}

TEST(Revert, Errors) {
  EXPECT_THROW(revert(x_poly({0, 0, 1}, 6)), NotReversible);
  EXPECT_THROW(revert(x_poly({1, 1}, 6)), NotReversible);
}

TEST(Revert, RoundTripProperty) {
  // random rational series with unit linear term
  unsigned seed = 7;
  auto next = [&] { seed = seed * 1103515245u + 12345u; return static_cast<long>((seed >> 16) % 19) - 9; };
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Rational> c{0, Rational(next() == 0 ? 1 : next(), 1)};
    if (c[1] == 0) c[1] = 1;
    for (int k = 2; k < 12; ++k) c.push_back(Rational(next(), 1 + (next() + 9)));
    Series s("x", 0, c, 12);
    Series r = revert(s);
    Series id = compose(s, r);
    for (int e = 0; e < 12; ++e) EXPECT_EQ(id[e], e == 1 ? 1 : 0);
  }
}

TEST(ExpLog, Basics) {
  EXPECT_EQ(exp(Series::zero("x", 6)), Series::constant("x", 1, 6));
  Series l = log(x_poly({1, 1}, 6));
  for (int e = 1; e < 6; ++e) EXPECT_EQ(l[e], Rational(e % 2 ? 1 : -1, e));
  Series c = x_poly({1, -6, 90}, 6);
  EXPECT_EQ(exp(log(c)), c);
  EXPECT_EQ(explog(explog(c, ExpLogKind::log), ExpLogKind::exp), c);
}

TEST(ExpLog, Domain) {
  EXPECT_THROW(exp(x_poly({1, 1}, 5)), ExpLogDomain);
  EXPECT_THROW(log(x_poly({2, 1}, 5)), ExpLogDomain);
}

TEST(Theta, Basics) {
  Series y = Series::monomial("y", 1, 1, 6);
  EXPECT_EQ(theta_derivative(y), y);
  EXPECT_TRUE(theta_derivative(Series::constant("y", 5, 6)).is_zero());
  Series C("y", 0, {1, -6, 90}, 3);
  Series t = theta_derivative(log(C));
  EXPECT_EQ(t[1], -6);
  EXPECT_EQ(t[2], 144);
}

TEST(Theta, IntegrationConstant) {
  EXPECT_THROW(integrate_theta(Series::constant("y", 1, 5)), ThetaIntegrationConstant);
  Series s("y", 1, {2, -3, 5}, 4);
  EXPECT_EQ(theta_derivative(integrate_theta(s)), s);
}

TEST(Json, RoundTrip) {
  Series s("t", -2, {frac(-1, 80), 0, frac(-13, 25920)}, 1);
  nlohmann::json j = to_json(s);
  EXPECT_EQ(j["variable"], "t");
  EXPECT_EQ(j["offset"], -2);
  EXPECT_EQ(j["order"], 1);
  EXPECT_EQ(j["coeffs"][0], "-1/80");
  EXPECT_EQ(j["coeffs"][1], "0/1");
  EXPECT_EQ(series_from_json(j), s);
}

TEST(Json, Malformed) {
  EXPECT_THROW(series_from_json(nlohmann::json{{"variable", "x"}}), ParseError);
  nlohmann::json j{{"variable", "x"}, {"offset", 0}, {"order", 3}, {"coeffs", {"1/1"}}};
  EXPECT_THROW(series_from_json(j), ParseError);
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
}
