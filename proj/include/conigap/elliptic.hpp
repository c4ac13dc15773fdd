#ifndef CONIGAP_ELLIPTIC_HPP
#define CONIGAP_ELLIPTIC_HPP

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "mirror.hpp"

namespace conigap {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;
inline const double kSqrt3 = std::sqrt(3.0);
inline const cplx kI{0.0, 1.0};

struct ThetaValue {
  cplx v, d1, d2;
};

// theta_1(u) = 2 sum_k (-1)^k q^{(k+1/2)^2/2} sin((2k+1) pi u), with term-wise derivatives.
inline ThetaValue theta1(cplx u, double q, bool withDerivative = true) {
  if (!(q > 0.0 && q < 0.9)) throw NomeOutOfRange("q = " + std::to_string(q));
  ThetaValue r{0.0, 0.0, 0.0};
  double lq = std::log(q), runmax = 0.0;
  for (int k = 0; k < 400; ++k) {
    double a = (2 * k + 1) * kPi;
    double c = 2.0 * std::exp(0.5 * (k + 0.5) * (k + 0.5) * lq) * ((k & 1) ? -1.0 : 1.0);
    cplx s = std::sin(a * u);
    cplx term = c * s;
    r.v += term;
    if (withDerivative) {
      cplx co = std::cos(a * u);
      r.d1 += c * a * co;
      r.d2 -= c * a * a * s;
    }
    double mag = std::abs(c) * std::cosh(a * u.imag()) * a * a;
    runmax = std::max(runmax, std::abs(r.v));
    if (k >= 2 && mag < 1e-17 * std::max(runmax, 1e-300)) break;
  }
  return r;
}

inline double nome_to_tau_imag(double q) { return -std::log(q) / (2 * kPi); }

struct EllipticFrame {
  double q = 0.0;
  cplx tau;
  std::array<double, 2> halfPeriods{0.5, 0.0};
  double zeta = 0.0;
  double frakx = 0.0;    // log x_+
  double tHooft = 0.0;   // t(q) by quadrature
  double tSeries = 0.0;  // t(q) from the exact conifold chain
  double branchLog = 0.0;
  double xplus = 0.0, xminus = 0.0;
  cplx phi3 = std::polar(1.0, 2 * kPi / 3);
  std::array<cplx, 2> ustar;   // zeta - tau/2, -zeta - tau/2
  std::array<cplx, 2> logxStar;
};

struct CutGeometry {
  // (argument, lower radius, upper radius) for I_0, I_+, I_-
  std::array<std::array<double, 3>, 3> intervals;
};

inline CutGeometry cut_geometry(const EllipticFrame& f) {
  return {{{{0.0, f.xminus, f.xplus}, {2 * kPi / 3, f.xminus, f.xplus}, {-2 * kPi / 3, f.xminus, f.xplus}}}};
}

namespace detail {
// Distance of u from the lattice coset c + Z + tau Z.
inline double lattice_distance(cplx u, cplx c, cplx tau) {
  cplx d = u - c;
  double n = std::round(d.imag() / tau.imag());
  d -= n * tau;
  d -= std::round(d.real());
  return std::abs(d);
}
} // namespace detail

inline cplx x_of_u(cplx u, double q, cplx tau) {
  if (detail::lattice_distance(u, 1.0 / 6, tau) < 1e-8) throw PoleProximity("x(u) has a pole at u = 1/6");
  return -theta1(u + 1.0 / 6, q, false).v / theta1(u - 1.0 / 6, q, false).v;
}
inline cplx x_of_u(cplx u, const EllipticFrame& f) { return x_of_u(u, f.q, f.tau); }

// d log x / du
inline cplx dlogx(cplx u, double q) {
  ThetaValue a = theta1(u + 1.0 / 6, q), b = theta1(u - 1.0 / 6, q);
  return a.d1 / a.v - b.d1 / b.v;
}
inline cplx d2logx(cplx u, double q) {
  ThetaValue a = theta1(u + 1.0 / 6, q), b = theta1(u - 1.0 / 6, q);
  return (a.d2 / a.v - (a.d1 / a.v) * (a.d1 / a.v)) - (b.d2 / b.v - (b.d1 / b.v) * (b.d1 / b.v));
}

// Argument of the resolvent logarithm: (x+1) theta1(u-1/6) / theta1(u-1/2).
inline cplx resolvent_arg(cplx u, double q) {
  return (theta1(u - 1.0 / 6, q, false).v - theta1(u + 1.0 / 6, q, false).v) / theta1(u - 0.5, q, false).v;
}
inline cplx resolvent_dlogarg(cplx u, double q) {
  ThetaValue a = theta1(u - 1.0 / 6, q), b = theta1(u + 1.0 / 6, q), c = theta1(u - 0.5, q);
  return (a.d1 - b.d1) / (a.v - b.v) - c.d1 / c.v;
}

// log of resolvent_arg continued along the segment a -> b, starting from the value la at a.
inline cplx continue_log_arg(cplx a, cplx b, cplx la, double q, int steps = 256) {
  cplx prev = resolvent_arg(a, q), acc = la;
  for (int k = 1; k <= steps; ++k) {
    cplx cur = resolvent_arg(a + (b - a) * (double(k) / steps), q);
    if (std::abs(cur) < 1e-14 || std::abs(cur) > 1e14) throw BranchAmbiguity("path passes through a log branch point");
    cplx ratio = cur / prev;
    if (std::abs(std::arg(ratio)) > 1.0) throw BranchAmbiguity("branch jump too large along path");
    acc += std::log(ratio);
    prev = cur;
  }
  return acc;
}

// R01 by path continuation from u = -1/6, where it vanishes.
inline cplx resolvent_R01(cplx u, const EllipticFrame& f) {
  if (detail::lattice_distance(u, 0.5, f.tau) < 1e-8 || detail::lattice_distance(u, 1.0 / 6, f.tau) < 1e-8)
    throw BranchAmbiguity("log branch point");
  return kI / kSqrt3 * continue_log_arg(cplx(-1.0 / 6, 0.0), u, 0.0, f.q);
}
inline cplx resolvent_dR01(cplx u, double q) { return kI / kSqrt3 * resolvent_dlogarg(u, q); }

namespace detail {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
  double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0) throw BisectionFailure("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double m = 0.5 * (lo + hi), fm = f(m);
    if ((fm <= 0) == (flo <= 0)) { lo = m; flo = fm; } else { hi = m; }
  }
  return 0.5 * (lo + hi);
}

// t(q) = t_CF(q)/9 from the exact conifold chain, as double coefficients of q^1..q^{n-1}.
inline const std::vector<double>& t_of_q_coeffs() {
  static const std::vector<double> c = [] {
    const int n = 36;
    ConifoldFramePack p = frobenius_conifold(n);
    Series tq = revert(p.qCF_of_tCF.renamed("q"));
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int e = 1; e < tq.order() && e < n; ++e) out[static_cast<std::size_t>(e)] = Rational(tq[e] / 9).get_d();
    return out;
  }();
  return c;
}

} // namespace detail

// t(q) series through the exact chain; also the Remark-style five-term truncation.
inline double t_series(double q) {
  const auto& c = detail::t_of_q_coeffs();
  double s = 0.0, p = 1.0;
  for (std::size_t e = 1; e < c.size(); ++e) { p *= q; s += c[e] * p; }
  return s;
}
inline double t_series_five_terms(double q) {
  return 3 * q + 4.5 * q * q + 9 * q * q * q + 9.75 * std::pow(q, 4) + 14.4 * std::pow(q, 5);
}

// (i/2pi) * closed integral of R01 dlog x along u = v - tau/2.
inline double t_quadrature(double q, cplx tau, int M = 400) {
  cplx start = cplx(-0.5, 0.0) - 0.5 * tau;
  cplx L = continue_log_arg(cplx(-1.0 / 6, 0.0), start, 0.0, q);
  cplx prev = resolvent_arg(start, q), sum = 0.0;
  for (int k = 0; k < M; ++k) {
    cplx u = start + double(k) / M;
    if (k > 0) {
      cplx cur = resolvent_arg(u, q);
      L += std::log(cur / prev);
      prev = cur;
    }
    sum += kI / kSqrt3 * L * dlogx(u, q);
  }
  return (kI / (2 * kPi) * sum / double(M)).real();
}

inline EllipticFrame lattice_solve(double q) {
  if (!(q > 0.0 && q <= 0.2)) throw NomeOutOfRange("lattice_solve validated for 0 < q <= 0.2, got " + std::to_string(q));
  EllipticFrame f;
  f.q = q;
  f.tau = cplx(0.0, nome_to_tau_imag(q));
  f.halfPeriods = {0.5, f.tau.imag() / 2};
  auto dre = [&](double v) { return dlogx(cplx(v, 0.0) - 0.5 * f.tau, q).real(); };
  f.zeta = detail::bisect(dre, 1e-9, 0.5 - 1e-9);
  f.ustar = {cplx(f.zeta, 0.0) - 0.5 * f.tau, cplx(-f.zeta, 0.0) - 0.5 * f.tau};
  for (int i = 0; i < 2; ++i) f.logxStar[static_cast<std::size_t>(i)] = std::log(x_of_u(f.ustar[static_cast<std::size_t>(i)], f));
  f.frakx = f.logxStar[0].real();
  f.branchLog = f.frakx;
  f.xplus = std::exp(f.frakx);
  f.xminus = 1.0 / f.xplus;
  f.tHooft = t_quadrature(q, f.tau);
  f.tSeries = t_series(q);
  if (std::abs(f.tHooft - f.tSeries) > 1e-8 * std::abs(f.tSeries))
    throw QuadratureSeriesMismatch("t quadrature " + std::to_string(f.tHooft) + " vs series " + std::to_string(f.tSeries));
  return f;
}

// Solve t(q) = t by bisection in q.
inline EllipticFrame frame_for_t(double t) {
  double lo = 1e-8, hi = 0.2;
  if (!(t > t_series(lo) && t < t_series(hi))) throw NomeOutOfRange("t outside the validated range");
  double q = detail::bisect([&](double qq) { return t_series(qq) - t; }, lo, hi, 1e-15);
  return lattice_solve(q);
}

// Weierstrass p and E_2 via q-series (period lattice 1, tau).
inline double eisenstein_E2(double q) {
  double s = 0.0;
  for (int n = 1; n < 400; ++n) {
    double qn = std::pow(q, n), term = n * qn / (1 - qn);
    s += term;
    if (term < 1e-18) break;
  }
  return 1 - 24 * s;
}

inline cplx reduce_to_cell(cplx z, cplx tau) {
  double n = std::round(z.imag() / tau.imag());
  z -= n * tau;
  z -= std::round(z.real());
  return z;
}

// -(log theta_1)''(z) = pi^2/sin^2(pi z) - 8 pi^2 sum n q^n/(1-q^n) cos(2 pi n z)
inline cplx bergman_density(cplx z, double q, cplx tau) {
  z = reduce_to_cell(z, tau);
  if (std::abs(z) < 1e-12) throw DiagonalSingularity("u1 = u2 mod lattice");
  cplx s = std::sin(kPi * z);
  cplx acc = kPi * kPi / (s * s);
  for (int n = 1; n < 400; ++n) {
    double qn = std::pow(q, n);
    cplx term = -8 * kPi * kPi * (n * qn / (1 - qn)) * std::cos(2 * kPi * n * z);
    acc += term;
    if (std::abs(term) < 1e-17 * std::abs(acc)) break;
  }
  return acc;
}

inline cplx weierstrass_p(cplx z, double q, cplx tau) {
  return bergman_density(z, q, tau) - kPi * kPi / 3 * eisenstein_E2(q);
}

inline cplx bergmann_CF(cplx u1, cplx u2, const EllipticFrame& f) {
  return weierstrass_p(u1 - u2, f.q, f.tau) + kPi * kPi / 3 * eisenstein_E2(f.q);
}

// theta1'/theta1, the primitive of -bergman_density
inline cplx theta1_logderiv(cplx z, double q) {
  ThetaValue t = theta1(z, q);
  return t.d1 / t.v;
}

// Equilibrium density on [x_-, x_+].
inline double density_rho(double s, const EllipticFrame& f) {
  double ls = std::log(s);
  if (!(s > 0) || !(std::abs(ls) < f.frakx)) throw OutsideSupport("s = " + std::to_string(s));
  auto g = [&](double v) { return std::log(x_of_u(cplx(v, 0.0) - 0.5 * f.tau, f)).real() - ls; };
  double v1 = detail::bisect(g, -f.zeta, f.zeta);
  double v2 = ls >= 0 ? detail::bisect(g, f.zeta, 0.5) : detail::bisect(g, -0.5, -f.zeta);
  cplx u1 = cplx(v1, 0.0) - 0.5 * f.tau, u2 = cplx(v2, 0.0) - 0.5 * f.tau;
  cplx dlog = continue_log_arg(u2, u1, 0.0, f.q, 512);
  cplx jump = kI / kSqrt3 * dlog; // R01(u1) - R01(u2)
  cplx rho = jump / (-2 * kPi * kI * s * f.tHooft);
  if (std::abs(rho.imag()) > 1e-8 * std::max(1.0, std::abs(rho.real())))
    throw BranchAmbiguity("density not real: imaginary part " + std::to_string(rho.imag()));
  return rho.real();
}

// Integral of rho over [x_-, x_+] by the substitution s = exp(Re log x(v - tau/2)), v in (-zeta, zeta).
inline double density_mass(const EllipticFrame& f, double a = -1.0, double b = 1.0) {
  auto integrand = [&](double v) {
    cplx u = cplx(v, 0.0) - 0.5 * f.tau;
    double s = std::exp(std::log(x_of_u(u, f)).real());
    if (std::abs(std::log(s)) >= f.frakx * (1 - 1e-15)) return 0.0;
    return density_rho(s, f) * s * dlogx(u, f.q).real();
  };
  return boost::math::quadrature::gauss<double, 60>::integrate(integrand, a * f.zeta, b * f.zeta);
}

// Cumulative distribution of rho.
inline double density_cdf(double s, const EllipticFrame& f) {
  if (s <= f.xminus) return 0.0;
  if (s >= f.xplus) return 1.0;
  auto g = [&](double v) { return std::log(x_of_u(cplx(v, 0.0) - 0.5 * f.tau, f)).real() - std::log(s); };
  double v = detail::bisect(g, -f.zeta, f.zeta);
  return density_mass(f, -1.0, v / f.zeta);
}

// Confining potential: Phi'(x) closed form, Phi(x) by quadrature of x Phi'(x) in Z = log x, tabulated.
class PotentialTable {
public:
  static const PotentialTable& instance() {
    static const PotentialTable t;
    return t;
  }
  static double dPhi_dZ(double Z) {
    return 2.0 / kSqrt3 * (std::atan((2 * std::exp(Z) - 1) / kSqrt3) - kPi / 6);
  }
  // Phi as a function of |Z|, Phi(x) = Phi(1/x).
  double phi_of_Z(double Z) const {
    Z = std::abs(Z);
    if (Z >= Zmax_) return vals_.back() + slope_ * (Z - Zmax_);
    double pos = Z / h_;
    std::size_t i = static_cast<std::size_t>(pos);
    double t = pos - i;
    double y0 = vals_[i], y1 = vals_[i + 1], d0 = dPhi_dZ(i * h_) * h_, d1 = dPhi_dZ((i + 1) * h_) * h_;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
  }

private:
  PotentialTable() {
    std::size_t n = static_cast<std::size_t>(Zmax_ / h_) + 1;
    vals_.resize(n);
    vals_[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i)
      vals_[i] = vals_[i - 1] + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(dPhi_dZ, (i - 1) * h_, i * h_);
  }
  double h_ = 1.0 / 512;
  double Zmax_ = 40.0;
  double slope_ = 2 * kPi / (3 * kSqrt3);
  std::vector<double> vals_;
};

struct PotentialValue {
  double phi, dphi;
};

inline PotentialValue potential_phi(double x) {
  if (!(x > 0)) throw NonPositiveArgument("Phi needs x > 0");
  double Z = std::log(x);
  double dphi = 2.0 / (kSqrt3 * x) * (std::atan((2 * x - 1) / kSqrt3) - kPi / 6);
  return {PotentialTable::instance().phi_of_Z(Z), dphi};
}

// 4 pi^2/27 - (psi'(1/6) + psi'(1/3))/18
double phi_infinity();

inline double Lambda(double x, double y) { return -0.5 * std::log(x * x + x * y + y * y); }
inline double lambdaZ(double Z) {
  double e = std::exp(Z);
  return 0.5 * std::log((e - 1) * (e - 1) / (e * e + e + 1));
}

struct BridgeValue {
  cplx z1, z2, eta, y;
  double residual;
  double formula_residual; // |z1, z2 from R01 and x - z1, z2 from H|
};

inline BridgeValue mirror_bridge(cplx u, const EllipticFrame& f) {
  const double pts[3] = {-1.0 / 6, 1.0 / 6, 0.5};
  for (double p : pts)
    if (detail::lattice_distance(u, p, f.tau) < 1e-6) throw PoleProximity("mirror_bridge near a pole of H");
  auto th = [&](double c) { return theta1(u - c, f.q, false).v; };
  auto H = [&](double a, double b, double c) {
    return kI * std::exp(3 * kPi * kI * a) * th(a) * th(a) / (th(b) * th(c));
  };
  cplx H1 = H(-1.0 / 6, 1.0 / 6, 0.5), H2 = H(1.0 / 6, -1.0 / 6, 0.5), H3 = H(0.5, -1.0 / 6, 1.0 / 6);
  BridgeValue r;
  r.eta = H1 + H2 + H3;
  r.z1 = -H1 / r.eta;
  r.z2 = -H2 / r.eta;
  r.y = 1.0 / (r.eta * r.eta * r.eta);
  r.residual = std::abs(1.0 + r.z1 + r.z2 + r.y / (r.z1 * r.z2));
  cplx x = x_of_u(u, f);
  cplx E = resolvent_arg(u, f.q); // exp(-i sqrt3 R01)
  cplx z1f = -E * x * x / ((1.0 + x) * r.eta), z2f = -E / (x * (1.0 + x) * r.eta);
  r.formula_residual = std::max(std::abs(z1f - r.z1), std::abs(z2f - r.z2));
  return r;
}

} // namespace conigap

#include <boost/math/special_functions/trigamma.hpp>

inline double conigap::phi_infinity() {
  return 4 * kPi * kPi / 27 - (boost::math::trigamma(1.0 / 6) + boost::math::trigamma(1.0 / 3)) / 18;
}

#endif
