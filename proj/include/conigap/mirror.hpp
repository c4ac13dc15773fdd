#ifndef CONIGAP_MIRROR_HPP
#define CONIGAP_MIRROR_HPP

#include <climits>
#include <map>
#include <string>
#include <vector>

#include "ratseries.hpp"
#include "ringpoly.hpp"

namespace conigap {

// (-1)^n (3n)!/(n!)^3, n < order.
inline Series hypergeom_C(int order) {
  std::vector<Rational> c;
  Rational v = 1;
  for (int n = 0; n < order; ++n) {
    c.push_back(v);
    v *= frac(-(3L * n + 1) * (3 * n + 2) * (3 * n + 3), (n + 1L) * (n + 1) * (n + 1));
  }
  return Series::power("y", c);
}

struct LargeRadiusPack {
  Series C, X, F, Q_of_y, qLR_of_y, y_of_Q;
  int order = 0;
};

inline LargeRadiusPack generators_LR(int order) {
  if (order < 2) throw InsufficientOrder("generators_LR needs order >= 2");
  LargeRadiusPack p;
  p.order = order;
  const Series y = Series::monomial("y", 1, 1, order);
  p.C = hypergeom_C(order);
  p.X = inverse(Series("y", 0, {1, 27}, order));
  p.F = theta_derivative(p.C) / p.C + (1 - p.X) / Rational(3);
  p.Q_of_y = (y * exp(integrate_theta(p.C - Rational(1)))).truncated(order);
  Series XC2 = p.X / (p.C * p.C);
  p.qLR_of_y = -(y * exp(integrate_theta(XC2 - Rational(1)))).truncated(order);
  p.y_of_Q = revert(p.Q_of_y.renamed("Q"));
  return p;
}

struct ThetaRingRules {
  RingPoly thetaX, thetaF, thetaLogC;
  int verified_order = 0;
};

// theta X = X^2 - X, theta F = -F^2 - (1-X)F/3 + X(1-X)/9, theta log C = F - (1-X)/3,
// each checked as a y-series identity before being returned.
inline ThetaRingRules theta_ring_rules(int order = 30) {
  ThetaRingRules r;
  r.thetaX = RingPoly{{{0, 2}, 1}, {{0, 1}, -1}};
  r.thetaF = RingPoly{{{2, 0}, -1}, {{1, 0}, Rational(-1, 3)}, {{1, 1}, Rational(1, 3)},
                      {{0, 1}, Rational(1, 9)}, {{0, 2}, Rational(-1, 9)}};
  r.thetaLogC = RingPoly{{{1, 0}, 1}, {{0, 0}, Rational(-1, 3)}, {{0, 1}, Rational(1, 3)}};
  LargeRadiusPack p = generators_LR(order + 1);
  auto check = [&](const Series& lhs, const RingPoly& rule, const char* name) {
    Series rhs = rule.evaluate(p.F, p.X);
    int n = std::min(order, std::min(lhs.order(), rhs.order()));
    if (n < order || !lhs.truncated(n).agrees_with(rhs.truncated(n)))
      throw RingClosureFailure(std::string(name) + " fails as a series identity");
  };
  check(theta_derivative(p.X), r.thetaX, "theta X");
  check(theta_derivative(p.F), r.thetaF, "theta F");
  check(theta_derivative(p.C) / p.C, r.thetaLogC, "theta log C");
  r.verified_order = order;
  return r;
}

inline const ThetaRingRules& ring_rules() {
  static const ThetaRingRules rules = theta_ring_rules(30);
  return rules;
}

inline RingPoly theta_poly(const RingPoly& p) {
  const auto& r = ring_rules();
  return p.derive(r.thetaF, r.thetaX);
}

inline Series X_in_w(int order) { return Series::monomial("w", -1, 1, order); }

// Polynomial in log(var) with series coefficients: sum_k c[k] log^k.
struct LogSeries {
  std::vector<Series> c;
};

enum class Chart { LR, CF };

// L = theta^3 + 27y (theta^3 + theta^2 + 2 theta/9); in the CF chart w = 1 + 27y, theta = (w-1) d/dw.
struct PicardFuchsOperator {
  Chart chart = Chart::LR;

  std::string var() const { return chart == Chart::LR ? "y" : "w"; }

  Series theta(const Series& s) const {
    if (chart == Chart::LR) return theta_derivative(s);
    return times_polynomial(derivative(s), {-1, 1});
  }
  // theta log(var)
  Series theta_log(int order) const {
    if (chart == Chart::LR) return Series::constant(var(), 1, order);
    return Series(var(), -1, {-1, 1}, order);
  }
  LogSeries theta(const LogSeries& f) const {
    LogSeries r;
    std::size_t K = f.c.size();
    r.c.resize(K);
    for (std::size_t k = 0; k < K; ++k) r.c[k] = theta(f.c[k]);
    for (std::size_t k = 1; k < K; ++k) {
      Series extra = f.c[k] * theta_log(f.c[k].order() + 2) * Rational(static_cast<long>(k));
      r.c[k - 1] = r.c[k - 1] + extra;
    }
    return r;
  }
  Series times_multiplier(const Series& s) const {
    return chart == Chart::LR ? times_polynomial(s, {0, 27}) : times_polynomial(s, {-1, 1});
  }
  LogSeries apply(const LogSeries& f) const {
    LogSeries t1 = theta(f), t2 = theta(t1), t3 = theta(t2);
    LogSeries r;
    for (std::size_t k = 0; k < f.c.size(); ++k)
      r.c.push_back(t3.c[k] + times_multiplier(t3.c[k] + t2.c[k] + t1.c[k] * Rational(2, 9)));
    return r;
  }
  Series apply(const Series& f) const { return apply(LogSeries{{f}}).c[0]; }
};

namespace detail {

// Solve L(known + h) = 0 for the log-free series h in the operator's chart, h known below `order`.
// Free coefficients at indicial roots are taken from `fixed` (default 0).
inline Series frobenius_complete(const PicardFuchsOperator& L, const LogSeries& known, int order,
                                 const std::map<int, Rational>& fixed) {
  const std::string v = L.var();
  // L(w^k) = sum_{d} ell_d(k) w^{k+d}
  int dmin = L.chart == Chart::LR ? 0 : -2, dmax = 1;
  auto ell = [&](int k) {
    Series r = L.apply(Series::monomial(v, k, 1, k + dmax + 1 + 4));
    std::vector<Rational> out;
    for (int d = dmin; d <= dmax; ++d) out.push_back(r[k + d]);
    return out;
  };
  std::vector<std::vector<Rational>> table;
  for (int k = 0; k < order; ++k) table.push_back(ell(k));
  Series R = known.c.empty() ? Series::zero(v, order + dmin) : L.apply(known).c[0];
  std::vector<Rational> h(static_cast<std::size_t>(order));
  for (int m = dmin; m - dmin < order; ++m) {
    // sum_d ell_d(m-d) h_{m-d} = -R_m
    Rational rhs = m < R.order() ? Rational(-R[m]) : Rational(0);
    if (m >= R.order()) throw InsufficientOrder("inhomogeneous term known only below " + std::to_string(R.order()));
    for (int d = dmin + 1; d <= dmax; ++d) {
      int k = m - d;
      if (k >= 0 && k < order) rhs -= table[static_cast<std::size_t>(k)][static_cast<std::size_t>(d - dmin)] * h[static_cast<std::size_t>(k)];
    }
    int k = m - dmin;
    const Rational& lead = table[static_cast<std::size_t>(k)][0];
    if (sgn(lead) == 0) {
      if (sgn(rhs) != 0)
        throw FrobeniusRecurrenceSingular("resonant equation at " + v + "^" + std::to_string(m) + " not satisfied");
      auto it = fixed.find(k);
      h[static_cast<std::size_t>(k)] = it == fixed.end() ? Rational(0) : it->second;
    } else {
      h[static_cast<std::size_t>(k)] = rhs / lead;
    }
  }
  return Series(v, 0, std::move(h), order);
}

} // namespace detail

struct FrobeniusBasis {
  PicardFuchsOperator op;
  LogSeries alpha, beta; // besides the constant solution
};

// LR: Pi_alpha = log y + A, Pi_beta = log^2 y / 2 + A log y + B.
inline FrobeniusBasis frobenius_LR(int order) {
  FrobeniusBasis b;
  b.op.chart = Chart::LR;
  Series one = Series::constant("y", 1, order + 3);
  Series A = detail::frobenius_complete(b.op, LogSeries{{Series::zero("y", order + 3), one}}, order, {});
  b.alpha = LogSeries{{A, one.truncated(order)}};
  Series B = detail::frobenius_complete(
      b.op, LogSeries{{Series::zero("y", order + 3), A, one * Rational(1, 2)}}, order, {});
  b.beta = LogSeries{{B, A, one.truncated(order) * Rational(1, 2)}};
  return b;
}

struct ConifoldFramePack {
  Series tCF_of_w, w_of_tCF, qCF_of_tCF, C_CF, F_CF;
  Series qCF_of_w, Pi_beta_analytic; // Pi_beta = tCF log w + Pi_beta_analytic
  int order = 0;
};

inline std::pair<Series, Series> frame_CF_generators(const ConifoldFramePack& pack, int order) {
  PicardFuchsOperator L{Chart::CF};
  Series t = pack.tCF_of_w.truncated(order + 1);
  Series C = L.theta(t).truncated(order);
  Series F = L.theta(C) / C + Rational(1, 3) - X_in_w(order) / Rational(3);
  return {C, F.truncated(order - 1)};
}

inline ConifoldFramePack frobenius_conifold(int order) {
  if (order < 3) throw InsufficientOrder("frobenius_conifold needs order >= 3");
  ConifoldFramePack p;
  p.order = order;
  PicardFuchsOperator L{Chart::CF};
  int N = order + 2;
  p.tCF_of_w = detail::frobenius_complete(L, LogSeries{}, N, {{1, 1}});
  Series P = p.tCF_of_w;
  p.Pi_beta_analytic = detail::frobenius_complete(L, LogSeries{{Series::zero("w", N + 3), P}}, N - 1, {});
  // theta Pi_beta = C_CF log w + E, q_CF = (w/27) exp(E/C_CF - const)
  LogSeries tb = L.theta(LogSeries{{p.Pi_beta_analytic, P.truncated(N - 1)}});
  Series C = tb.c[1];
  Series ratio = (tb.c[0] / C).truncated(order);
  ratio = ratio - ratio[0];
  Series w = Series::monomial("w", 1, 1, order + 1);
  p.qCF_of_w = (w * exp(ratio) / Rational(27)).truncated(order + 1);
  p.tCF_of_w = p.tCF_of_w.truncated(order + 1);
  p.w_of_tCF = revert(p.tCF_of_w.renamed("t"));
  p.qCF_of_tCF = compose(p.qCF_of_w, p.w_of_tCF);
  auto [Ccf, Fcf] = frame_CF_generators(p, order);
  p.C_CF = Ccf;
  p.F_CF = Fcf;
  return p;
}

} // namespace conigap

#endif
