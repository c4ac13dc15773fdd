#include <gtest/gtest.h>

#include <conigap/mirror.hpp>

using namespace conigap;

TEST(HypergeomC, Coefficients) {
  Series C = hypergeom_C(4);
  EXPECT_EQ(C[0], 1);
  EXPECT_EQ(C[1], -6);
  EXPECT_EQ(C[2], 90);
  EXPECT_EQ(C[3], -1680);
}

TEST(HypergeomC, FactorialFormula) {
  Series C = hypergeom_C(12);
  mpz_class f3 = 1, f1 = 1;
  for (int n = 1; n < 12; ++n) {
    f1 *= n;
    f3 *= (3 * n - 2) * (3 * n - 1) * (3 * n);
    Rational want(f3, f1 * f1 * f1);
    want.canonicalize();
    if (n % 2) want = -want;
    EXPECT_EQ(C[n], want) << n;
  }
}

TEST(GeneratorsLR, MirrorMap) {
  LargeRadiusPack p = generators_LR(5);
  EXPECT_EQ(p.Q_of_y[1], 1);
  EXPECT_EQ(p.Q_of_y[2], -6);
  EXPECT_EQ(p.Q_of_y[3], 63);
  Series yQ = p.y_of_Q;
  EXPECT_EQ(yQ[1], 1);
  EXPECT_EQ(yQ[2], 6);
  EXPECT_EQ(yQ[3], 9);
}

TEST(GeneratorsLR, MirrorMapRoundTrip) {
  LargeRadiusPack p = generators_LR(11);
  Series id = compose(p.Q_of_y.renamed("y"), p.y_of_Q);
  for (int e = 0; e < id.order(); ++e) EXPECT_EQ(id[e], e == 1 ? 1 : 0);
}

TEST(GeneratorsLR, DualCoordinate) {
  LargeRadiusPack p = generators_LR(6);
  Series m = -p.qLR_of_y;
  EXPECT_EQ(m[1], 1);
  EXPECT_EQ(m[2], -15);
  EXPECT_EQ(m[3], 279);
  Series mQ = -compose(p.qLR_of_y, p.y_of_Q);
  EXPECT_EQ(mQ[1], 1);
  EXPECT_EQ(mQ[2], -9);
  EXPECT_EQ(mQ[3], 108);
  EXPECT_EQ(mQ[4], -1461);
}

TEST(GeneratorsLR, Propagator) {
  LargeRadiusPack p = generators_LR(4);
  EXPECT_EQ(p.F[0], 0);
  EXPECT_EQ(p.F[1], 3);
  EXPECT_EQ(p.F[2], -99);
  EXPECT_EQ(p.X[1], -27);
  EXPECT_EQ(p.X[2], 729);
}

TEST(GeneratorsLR, Errors) { EXPECT_THROW(generators_LR(1), InsufficientOrder); }

TEST(RingRules, ClosureToOrder30) {
  ThetaRingRules r = theta_ring_rules(30);
  EXPECT_EQ(r.verified_order, 30);
  EXPECT_EQ(r.thetaX.coeff(0, 2), 1);
  EXPECT_EQ(r.thetaX.coeff(0, 1), -1);
  EXPECT_EQ(r.thetaF.coeff(2, 0), -1);
}

TEST(RingRules, LowOrderValues) {
  LargeRadiusPack p = generators_LR(4);
  Series tX = theta_derivative(p.X);
  EXPECT_EQ(tX[1], -27);
  Series tF = theta_derivative(p.F);
  EXPECT_EQ(tF[1], 3);
  EXPECT_EQ(tF[2], -198);
  EXPECT_TRUE(theta_poly(RingPoly::constant(5)).empty());
}

TEST(RingRules, ThetaPolyMatchesSeries) {
  // theta acting on a ring polynomial agrees with theta of its series evaluation
  LargeRadiusPack p = generators_LR(12);
  RingPoly P{{{2, 1}, frac(3, 7)}, {{1, -1}, -2}, {{0, 3}, frac(1, 5)}};
  Series lhs = theta_derivative(P.evaluate(p.F, p.X));
  Series rhs = theta_poly(P).evaluate(p.F, p.X);
  EXPECT_TRUE(lhs.truncated(10).agrees_with(rhs.truncated(10)));
}

TEST(Conifold, MirrorMap) {
  ConifoldFramePack p = frobenius_conifold(6);
  EXPECT_EQ(p.tCF_of_w[1], 1);
  EXPECT_EQ(p.tCF_of_w[2], frac(11, 18));
  EXPECT_EQ(p.qCF_of_tCF[1], frac(1, 27));
  EXPECT_EQ(p.qCF_of_tCF[2], frac(-1, 486));
  EXPECT_EQ(p.qCF_of_tCF[3], frac(1, 13122));
  EXPECT_EQ(p.w_of_tCF[1], 1);
  EXPECT_EQ(p.w_of_tCF[2], frac(-11, 18));
  Series id = compose(p.tCF_of_w.renamed("w"), p.w_of_tCF.renamed("w"));
  for (int e = 0; e < id.order(); ++e) EXPECT_EQ(id[e], e == 1 ? 1 : 0);
}

TEST(Conifold, Generators) {
  ConifoldFramePack p = frobenius_conifold(8);
  EXPECT_EQ(p.C_CF[0], -1);
  EXPECT_EQ(p.F_CF.valuation(), -1);
  EXPECT_EQ(p.F_CF[-1], frac(-1, 3));
  EXPECT_EQ(p.F_CF[0], frac(1, 9));
}

TEST(Conifold, XInW) {
  Series X = X_in_w(5);
  EXPECT_EQ(X[-1], 1);
  EXPECT_EQ(X.valuation(), -1);
  Series w = Series::monomial("w", 1, 1, 6);
  Series one = X * w;
  EXPECT_EQ(one[0], 1);
  Series h = (Rational(1) - X) / Rational(3);
  EXPECT_EQ(h[0], frac(1, 3));
  EXPECT_EQ(h[-1], frac(-1, 3));
}

TEST(Conifold, ErrorsOnTinyOrder) { EXPECT_THROW(frobenius_conifold(2), InsufficientOrder); }
