#ifndef CONIGAP_HAE_HPP
#define CONIGAP_HAE_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "mirror.hpp"
#include "ringpoly.hpp"

namespace conigap {

struct QuasiModularPoly {
  int genus = 0;
  RingPoly terms;
};

struct AmbiguityVector {
  int genus = 0;
  std::vector<Rational> a; // a[n] multiplies X^n, n = 0..2g-2
};

struct GapTarget {
  int genus = 0;
  Rational bernoulli;
  Rational leading;
  std::vector<int> polarZeros;
};

struct InvariantRow {
  int g = 0, d = 0;
  Rational N;
};
using InvariantTable = std::vector<InvariantRow>;

// t/(e^t - 1) convention.
inline Rational bernoulli(int n) {
  static std::mutex mu;
  static std::vector<Rational> B{Rational(1)};
  std::lock_guard<std::mutex> lock(mu);
  for (int m = static_cast<int>(B.size()); m <= n; ++m) {
    Rational s = 0;
    mpz_class binom = 1; // C(m+1, k)
    for (int k = 0; k < m; ++k) {
      s += Rational(binom) * B[static_cast<std::size_t>(k)];
      binom = binom * (m + 1 - k) / (k + 1);
    }
    B.push_back(-s / (m + 1));
  }
  return B[static_cast<std::size_t>(n)];
}

inline GapTarget gap_target(int g) {
  GapTarget t;
  t.genus = g;
  t.bernoulli = bernoulli(2 * g);
  mpz_class p3;
  mpz_ui_pow_ui(p3.get_mpz_t(), 3, static_cast<unsigned long>(g - 1));
  t.leading = Rational(p3) * t.bernoulli / (2 * g * (2 * g - 2));
  for (int e = 3 - 2 * g; e <= -1; ++e) t.polarZeros.push_back(e);
  return t;
}

struct LaurentMonomial {
  Rational coeff;
  int exponent = 0;
};

inline LaurentMonomial gue_reference(int g) {
  return {bernoulli(2 * g) / (2 * g * (2 * g - 2)), 2 - 2 * g};
}

// theta GW_1 = -F/2 - X/12
inline QuasiModularPoly genus1_datum() {
  return {1, RingPoly{{{1, 0}, frac(-1, 2)}, {{0, 1}, frac(-1, 12)}}};
}

inline bool in_regularity_span(int g, int m, int n) {
  return 0 <= m && m <= 3 * g - 3 && 1 - g <= n && n <= 2 * g - 2 && 3 * n + m >= 0;
}

// dGW_g/dF from D_{g'} = theta GW_{g'}, g' < g.
inline QuasiModularPoly hae_rhs(int g, const std::map<int, RingPoly>& D, bool reversed_split = false) {
  for (int h = 1; h < g; ++h)
    if (!D.count(h)) throw MissingLowerGenus("theta GW_" + std::to_string(h) + " not available");
  RingPoly s;
  for (int h = 1; h < g; ++h) {
    int a = reversed_split ? g - h : h;
    s += D.at(g - a) * D.at(a);
  }
  const RingPoly& Dg1 = D.at(g - 1);
  s += theta_poly(Dg1);
  s -= RingPoly{{{1, 0}, 1}, {{0, 0}, frac(-1, 3)}, {{0, 1}, frac(1, 3)}} * Dg1;
  return {g, s.shifted_X(-1) * frac(3, 2)};
}

inline QuasiModularPoly integrate_in_F(const QuasiModularPoly& rhs, int g) {
  QuasiModularPoly r{g, {}};
  for (const auto& [key, v] : rhs.terms.terms()) {
    auto [m, n] = key;
    if (!in_regularity_span(g, m + 1, n))
      throw RegularityViolation("F^" + std::to_string(m + 1) + " X^" + std::to_string(n) + " at genus " + std::to_string(g));
    r.terms.add({m + 1, n}, v / (m + 1));
  }
  return r;
}

// Cached conifold frame data at w-order W.
inline std::shared_ptr<const ConifoldFramePack> conifold_pack(int W) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const ConifoldFramePack>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.lower_bound(W);
  if (it != cache.end() && it->first == W) return it->second;
  auto p = std::make_shared<const ConifoldFramePack>(frobenius_conifold(W));
  cache[W] = p;
  return p;
}

// GW in the conifold frame as a Laurent series in t_CF, known below `order`.
inline Series conifold_laurent(const RingPoly& p, const std::optional<AmbiguityVector>& amb, int order) {
  RingPoly full = p;
  if (amb)
    for (std::size_t n = 0; n < amb->a.size(); ++n) full.add({0, static_cast<int>(n)}, amb->a[n]);
  if (full.empty()) return Series::zero("t", order);
  int P = 0;
  for (const auto& [key, v] : full.terms()) P = std::max(P, key.first + key.second);
  // F^m X^n = (-1/3)^m A^m w^{-(m+n)}, A = -3 w F_CF
  int W = std::max(order + P + 2, 4);
  auto pack = conifold_pack(W);
  Series A = times_polynomial(pack->F_CF, {0, -3}).truncated(W);
  std::map<int, Series> Apow;
  Series lw = Series::zero("w", W - P);
  for (const auto& [key, v] : full.terms()) {
    auto [m, n] = key;
    auto it = Apow.find(m);
    if (it == Apow.end()) it = Apow.emplace(m, m ? pow(A, m) : Series::constant("w", 1, W)).first;
    Rational c = v;
    for (int i = 0; i < m; ++i) c *= frac(-1, 3);
    std::vector<Rational> cc;
    for (int e = 0; e < W; ++e) cc.push_back(it->second[e] * c);
    lw = lw + Series("w", -(m + n), std::move(cc), W - (m + n)).truncated(W - P);
  }
  Series wt = pack->w_of_tCF;
  Series r = compose(lw.renamed("w"), wt);
  if (r.order() < order)
    throw InsufficientOrder("conifold expansion known below t^" + std::to_string(r.order()) + ", need " + std::to_string(order));
  return r.truncated(order);
}

namespace detail {

// Fraction-free elimination (Bareiss) on an integer-scaled copy; returns the unique solution.
inline std::vector<Rational> bareiss_solve(std::vector<std::vector<Rational>> M, std::vector<Rational> b) {
  std::size_t n = M.size();
  std::vector<std::vector<mpz_class>> A(n, std::vector<mpz_class>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class l = b[i].get_den();
    for (std::size_t j = 0; j < n; ++j) l = lcm(l, M[i][j].get_den());
    for (std::size_t j = 0; j < n; ++j) A[i][j] = M[i][j].get_num() * (l / M[i][j].get_den());
    A[i][n] = b[i].get_num() * (l / b[i].get_den());
  }
  mpz_class prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && A[piv][k] == 0) ++piv;
    if (piv == n) throw SingularGapSystem("gap system is not uniquely solvable");
    std::swap(A[k], A[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j) A[i][j] = (A[k][k] * A[i][j] - A[i][k] * A[k][j]) / prev;
      A[i][k] = 0;
    }
    prev = A[k][k];
  }
  std::vector<Rational> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational s = Rational(A[i][n]);
    for (std::size_t j = i + 1; j < n; ++j) s -= Rational(A[i][j]) * x[j];
    x[i] = s / Rational(A[i][i]);
  }
  return x;
}

} // namespace detail

// Sequential genus-by-genus solver; keeps GW_g and theta GW_g for all fixed genera.
class HaeSolver {
public:
  HaeSolver() { D_[1] = genus1_datum().terms; }

  std::pair<AmbiguityVector, QuasiModularPoly> fix_ambiguity(int g) {
    if (g < 2) throw MissingLowerGenus("fix_ambiguity needs g >= 2");
    for (int h = 2; h < g; ++h)
      if (!GW_.count(h)) fix_ambiguity(h);
    if (auto it = GW_.find(g); it != GW_.end()) return {amb_.at(g), it->second};
    QuasiModularPoly P = integrate_in_F(hae_rhs(g, D_), g);
    GapTarget tgt = gap_target(g);
    Series base = conifold_laurent(P.terms, std::nullopt, 0);
    std::vector<Series> cols;
    for (int n = 0; n <= 2 * g - 2; ++n) cols.push_back(conifold_laurent(RingPoly{{{0, n}, 1}}, std::nullopt, 0));
    std::vector<std::vector<Rational>> M;
    std::vector<Rational> rhs;
    for (int e = 2 - 2 * g; e <= -1; ++e) {
      std::vector<Rational> row;
      for (const auto& c : cols) row.push_back(c[e]);
      M.push_back(row);
      rhs.push_back((e == 2 - 2 * g ? tgt.leading : Rational(0)) - base[e]);
    }
    M.push_back(std::vector<Rational>(static_cast<std::size_t>(2 * g - 1), Rational(1)));
    rhs.push_back(0);
    AmbiguityVector amb{g, detail::bareiss_solve(M, rhs)};
    QuasiModularPoly full = P;
    for (int n = 0; n <= 2 * g - 2; ++n) full.terms.add({0, n}, amb.a[static_cast<std::size_t>(n)]);
    for (const auto& [key, v] : full.terms.terms())
      if (!in_regularity_span(g, key.first, key.second))
        throw RegularityViolation("F^" + std::to_string(key.first) + " X^" + std::to_string(key.second));
    GW_[g] = full;
    amb_[g] = amb;
    D_[g] = theta_poly(full.terms);
    return {amb, full};
  }

  const QuasiModularPoly& potential(int g) {
    fix_ambiguity(g);
    return GW_.at(g);
  }
  const std::map<int, RingPoly>& theta_potentials() const { return D_; }

private:
  std::map<int, QuasiModularPoly> GW_;
  std::map<int, AmbiguityVector> amb_;
  std::map<int, RingPoly> D_;
};

inline HaeSolver& shared_hae() {
  static HaeSolver s;
  return s;
}

inline InvariantTable gw_invariants(int g, int d_max, HaeSolver& solver = shared_hae()) {
  if (d_max < 1) return {};
  LargeRadiusPack p = generators_LR(d_max + 1);
  Series s;
  int power = 0; // divide by d^power
  if (g == 0) {
    s = -(p.X / pow(p.C, 3)) / Rational(3);
    power = 3;
  } else if (g == 1) {
    s = genus1_datum().terms.evaluate(p.F, p.X) / p.C;
    power = 1;
  } else {
    s = solver.potential(g).terms.evaluate(p.F, p.X);
  }
  Series inQ = compose(s, p.y_of_Q);
  if (inQ.order() <= d_max) throw InsufficientOrder("Q-series known below Q^" + std::to_string(inQ.order()));
  InvariantTable t;
  for (int d = 1; d <= d_max; ++d) {
    Rational N = inQ[d];
    for (int i = 0; i < power; ++i) N /= d;
    t.push_back({g, d, N});
  }
  return t;
}

} // namespace conigap

#endif
