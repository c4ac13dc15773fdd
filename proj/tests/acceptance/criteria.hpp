#ifndef CONIGAP_TESTS_ACCEPTANCE_CRITERIA_HPP
#define CONIGAP_TESTS_ACCEPTANCE_CRITERIA_HPP

#include <chrono>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <conigap/coulomb.hpp>
#include <conigap/hae.hpp>
#include <conigap/mirror.hpp>
#include <conigap/tr.hpp>

#include "../oracle/genus01_oracle.hpp"

namespace conigap::acceptance {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double timeLimit; // seconds
  std::function<Outcome()> run;
};

struct Report {
  int id;
  std::string name;
  bool pass;
  double seconds;
  std::string detail;
  std::string line() const {
    std::ostringstream os;
    os << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << " (" << seconds << " s): " << detail;
    return os.str();
  }
};

namespace detail {

class Checks {
public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_ += (failures_.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  Outcome outcome() const {
    std::string d = pass_ ? notes_ : "failed: " + failures_ + (notes_.empty() ? "" : " | " + notes_);
    return {pass_, d};
  }

private:
  bool pass_ = true;
  std::string failures_, notes_;
};

inline std::string fmt_sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline std::string coeff_list(const Series& s, int from, int to) {
  std::string r = "[";
  for (int e = from; e <= to; ++e) r += (e > from ? ", " : "") + rational_to_string(s[e]);
  return r + "]";
}

inline bool coeffs_equal(const Series& s, int from, const std::vector<Rational>& want) {
  for (std::size_t k = 0; k < want.size(); ++k)
    if (s[from + static_cast<int>(k)] != want[k]) return false;
  return true;
}

} // namespace detail

inline Outcome mirror_map_exactness() {
  detail::Checks c;
  LargeRadiusPack p = generators_LR(6);
  c.expect(detail::coeffs_equal(p.Q_of_y, 1, {1, -6, 63}), "Q(y) = " + detail::coeff_list(p.Q_of_y, 1, 3));
  Series mq = -p.qLR_of_y;
  c.expect(detail::coeffs_equal(mq, 1, {1, -33, 1035}),
           "-q_LR(y) = " + detail::coeff_list(mq, 1, 3) + ", expected [1/1, -33/1, 1035/1]");
  Series mqQ = -compose(p.qLR_of_y, p.y_of_Q);
  c.expect(detail::coeffs_equal(mqQ, 1, {1, -9, 108, -1461}), "-q_LR(Q) = " + detail::coeff_list(mqQ, 1, 4));
  ConifoldFramePack cf = frobenius_conifold(5);
  c.expect(detail::coeffs_equal(cf.tCF_of_w, 1, {1, frac(11, 18)}), "t_CF(w) = " + detail::coeff_list(cf.tCF_of_w, 1, 2));
  c.expect(detail::coeffs_equal(cf.qCF_of_tCF, 1, {frac(1, 27), frac(-1, 486), frac(1, 13122)}),
           "q_CF(t) = " + detail::coeff_list(cf.qCF_of_tCF, 1, 3));
  c.note("-q_LR(y) = " + detail::coeff_list(mq, 1, 3));
  return c.outcome();
}

inline Outcome ring_closure() {
  detail::Checks c;
  try {
    ThetaRingRules r = theta_ring_rules(30);
    c.note("verified to y^" + std::to_string(r.verified_order));
  } catch (const RingClosureFailure& e) {
    c.expect(false, e.what());
  }
  return c.outcome();
}

inline Outcome genus_zero_one() {
  detail::Checks c;
  oracle::Result o = oracle::invariants(3);
  InvariantTable g0 = gw_invariants(0, 3), g1 = gw_invariants(1, 1);
  const Rational lit0[] = {3, frac(-45, 8), frac(244, 9)};
  for (int d = 0; d < 3; ++d) {
    c.expect(g0[static_cast<std::size_t>(d)].N == lit0[d], "N_{0," + std::to_string(d + 1) + "} literal");
    c.expect(g0[static_cast<std::size_t>(d)].N == o.genus0[static_cast<std::size_t>(d)], "N_{0," + std::to_string(d + 1) + "} oracle");
  }
  c.expect(g1[0].N == frac(1, 4) && g1[0].N == o.genus1[0], "N_{1,1}");
  c.note("N_{0,1..3} = " + rational_to_string(g0[0].N) + ", " + rational_to_string(g0[1].N) + ", " +
         rational_to_string(g0[2].N) + "; N_{1,1} = " + rational_to_string(g1[0].N));
  return c.outcome();
}

inline Outcome conifold_gap_exact() {
  detail::Checks c;
  HaeSolver solver;
  for (int g = 2; g <= 6; ++g) {
    auto [amb, P] = solver.fix_ambiguity(g);
    Series L = conifold_laurent(P.terms, std::nullopt, 2 * (2 * g - 2));
    for (int e = 3 - 2 * g; e <= -1; ++e)
      c.expect(sgn(L[e]) == 0, "g=" + std::to_string(g) + " coefficient of t^" + std::to_string(e) + " is " + rational_to_string(L[e]));
    c.expect(L[2 - 2 * g] == gap_target(g).leading, "g=" + std::to_string(g) + " leading " + rational_to_string(L[2 - 2 * g]));
    for (const auto& [key, v] : P.terms.terms())
      c.expect(in_regularity_span(g, key.first, key.second), "g=" + std::to_string(g) + " monomial outside regularity span");
    c.note("g=" + std::to_string(g) + ": " + rational_to_string(L[2 - 2 * g]));
  }
  return c.outcome();
}

inline Outcome elliptic_layer() {
  detail::Checks c;
  for (double q : {1e-4, 1e-3, 1e-2}) {
    EllipticFrame f = lattice_solve(q);
    double rel = std::abs(f.tHooft - t_series_five_terms(q)) / t_series_five_terms(q);
    c.expect(rel < 1e-8, "t(q) at q=" + detail::fmt_sci(q) + " rel " + detail::fmt_sci(rel));
  }
  {
    EllipticFrame f = lattice_solve(1e-3);
    double t = f.tHooft;
    double series = std::sqrt(t) * (2 + t / 2 - 3 * t * t / 5 + 115 * t * t * t / 3024 - 341 * std::pow(t, 4) / 864);
    double rel = std::abs(f.frakx - series) / f.frakx;
    c.expect(rel < 1e-8, "log x_+ vs sqrt(t) series at q=1e-3 rel " + detail::fmt_sci(rel));
    c.note("log x_+ rel " + detail::fmt_sci(rel));
    cplx x0 = x_of_u(0.0, f), xh = x_of_u(0.5, f), xm = x_of_u(-0.5, f);
    double sv = std::max({std::abs(x0 - cplx(-1.0)), std::abs(xh - cplx(1.0)), std::abs(xm - cplx(1.0))});
    c.expect(sv < 1e-12, "special values x(0) = " + detail::fmt_sci(x0.real()) + ", x(1/2) = " + detail::fmt_sci(xh.real()) +
                             " against -1, 1");
  }
  double qp = 0.0;
  for (double q : {1e-2, 0.2}) {
    EllipticFrame f = lattice_solve(q);
    for (int a = 0; a < 10; ++a)
      for (int b = 0; b < 10; ++b) {
        cplx u = cplx(-0.45 + 0.1 * a, 0.0) + (-0.45 + 0.1 * b) * f.tau;
        ThetaValue t0 = theta1(u, q, false), t1 = theta1(u + 1.0, q, false), t2 = theta1(u + f.tau, q, false);
        qp = std::max(qp, std::abs(t1.v + t0.v) / std::abs(t0.v));
        qp = std::max(qp, std::abs(t2.v * std::sqrt(q) * std::exp(2 * kPi * kI * u) + t0.v) / std::abs(t0.v));
        if (conigap::detail::lattice_distance(u, 1.0 / 6, f.tau) > 1e-3 && conigap::detail::lattice_distance(u, -1.0 / 6, f.tau) > 1e-3)
          qp = std::max(qp, std::abs(x_of_u(u + f.tau, f) / x_of_u(u, f) - f.phi3 * f.phi3));
      }
  }
  c.expect(qp < 1e-12, "quasi-periodicity residual " + detail::fmt_sci(qp));
  EllipticFrame f = lattice_solve(1e-2);
  double br = 0.0;
  for (cplx u : {cplx(0.23, 0.07), cplx(0.05, -0.3), cplx(-0.31, 0.2)}) br = std::max(br, mirror_bridge(u, f).residual);
  c.expect(br < 1e-10, "mirror-curve residual " + detail::fmt_sci(br));
  double mass = density_mass(f);
  c.expect(std::abs(mass - 1) < 1e-6, "density mass " + std::to_string(mass));
  c.note("quasi-periodicity " + detail::fmt_sci(qp) + ", bridge " + detail::fmt_sci(br) + ", mass-1 " + detail::fmt_sci(mass - 1));
  return c.outcome();
}

inline Outcome cross_pipeline() {
  detail::Checks c;
  const std::vector<double> qs{0.008, 0.01, 0.012};
  for (auto [g, tol] : {std::pair{2, 1e-5}, std::pair{3, 1e-4}})
    for (const auto& r : crosscheck_gap(g, qs)) {
      std::string tag = "g=" + std::to_string(g) + " q=" + std::to_string(r.q) + " rel " + detail::fmt_sci(r.rel_dev);
      c.expect(r.rel_dev < tol, tag);
      c.note(tag);
    }
  return c.outcome();
}

inline Outcome bridge_identity() {
  detail::Checks c;
  EllipticFrame f = lattice_solve(1e-3);
  double rel = std::abs(f.tHooft - t_series(1e-3)) / f.tHooft;
  c.expect(rel < 1e-7, "t quadrature vs exact chain rel " + detail::fmt_sci(rel));
  auto pack = conifold_pack(40);
  double tcf = 9 * f.tHooft, w = 0.0, p = 1.0;
  for (int e = 0; e < pack->w_of_tCF.order(); ++e) {
    w += Rational(pack->w_of_tCF[e]).get_d() * p;
    p *= tcf;
  }
  double yChain = (w - 1) / 27;
  cplx yEta = mirror_bridge(cplx(0.23, 0.07), f).y;
  double relY = std::abs(yEta - yChain) / std::abs(yChain);
  c.expect(relY < 1e-7, "y from eta vs chain rel " + detail::fmt_sci(relY));
  c.note("t rel " + detail::fmt_sci(rel) + ", y rel " + detail::fmt_sci(relY));
  return c.outcome();
}

inline Outcome coulomb_sampler() {
  detail::Checks c;
  EnsembleConfig cfg;
  cfg.N = 64;
  cfg.t = 0.1;
  cfg.burnin = 20'000;
  cfg.sweeps = cfg.burnin + 1'000'000;
  cfg.seed = 20240901;
  EmpiricalSpectrum sp = metropolis_run(cfg);
  EllipticFrame f = frame_for_t(cfg.t);
  SpectrumReport r = spectrum_stats(sp, f);
  c.expect(r.ks < 0.05, "KS " + std::to_string(r.ks));
  c.expect(r.edge_err_lo < 0.02 && r.edge_err_hi < 0.02, "edge errors " + std::to_string(r.edge_err_lo) + ", " + std::to_string(r.edge_err_hi));
  c.expect(r.acceptance >= 0.2 && r.acceptance <= 0.7, "acceptance " + std::to_string(r.acceptance));
  c.note("KS " + std::to_string(r.ks) + ", edges " + std::to_string(r.edge_err_lo) + "/" + std::to_string(r.edge_err_hi) +
         ", acceptance " + std::to_string(r.acceptance));
  return c.outcome();
}

inline Outcome gue_reference_check() {
  detail::Checks c;
  c.expect(bernoulli(4) == frac(-1, 30) && bernoulli(6) == frac(1, 42), "B_4, B_6");
  for (int g = 2; g <= 5; ++g) {
    LaurentMonomial m = gue_reference(g);
    c.expect(m.exponent == 2 - 2 * g && m.coeff == bernoulli(2 * g) / (2 * g * (2 * g - 2)), "gue_reference(" + std::to_string(g) + ")");
  }
  for (int g = 2; g <= 8; ++g) {
    mpz_class p27, p9;
    mpz_ui_pow_ui(p27.get_mpz_t(), 27, static_cast<unsigned long>(g - 1));
    mpz_ui_pow_ui(p9.get_mpz_t(), 9, static_cast<unsigned long>(2 * g - 2));
    Rational scaled = gap_target(g).leading * Rational(p27) / Rational(p9);
    scaled.canonicalize();
    c.expect(scaled == gue_reference(g).coeff, "leading-coefficient consistency at g=" + std::to_string(g));
  }
  return c.outcome();
}

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "mirror-map exactness", 1.0, mirror_map_exactness},
      {2, "ring closure", 1.0, ring_closure},
      {3, "genus 0/1 against independent oracle", 5.0, genus_zero_one},
      {4, "conifold gap, exact, g=2..6", 600.0, conifold_gap_exact},
      {5, "elliptic layer", 30.0, elliptic_layer},
      {6, "recursion vs anomaly-equation derivatives", 600.0, cross_pipeline},
      {7, "bridge identity t = t_CF/9", 60.0, bridge_identity},
      {8, "Coulomb sampler", 300.0, coulomb_sampler},
      {9, "Gaussian reference coefficients", 5.0, gue_reference_check},
  };
  return all;
}

inline Report run(const Criterion& c) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s > c.timeLimit) {
    o.pass = false;
    o.detail += " | runtime " + std::to_string(s) + " s exceeds " + std::to_string(c.timeLimit) + " s";
  }
  return {c.id, c.name, o.pass, s, o.detail};
}

} // namespace conigap::acceptance

#endif
