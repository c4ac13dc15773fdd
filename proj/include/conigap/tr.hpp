#ifndef CONIGAP_TR_HPP
#define CONIGAP_TR_HPP

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "elliptic.hpp"
#include "hae.hpp"

namespace conigap {

// Spectral curve data in a uniformizing coordinate u. X and y are given relative to their
// values at ramification point i, so that X(u, i) = s^2 defines the local coordinate s.
class SpectralCurve {
public:
  virtual ~SpectralCurve() = default;
  virtual std::vector<cplx> ramification() const = 0;
  virtual cplx X(cplx u, std::size_t i) const = 0;
  virtual cplx dX(cplx u) const = 0;
  virtual cplx d2X(cplx u) const = 0;
  virtual cplx y(cplx u, std::size_t i) const = 0;
  virtual cplx B(cplx u1, cplx u2) const = 0;
  // Radius in s of a disc around each ramification point free of other singular points.
  virtual double local_radius() const = 0;
};

// x = log x(u), y = scale * R01(u), B = bergman kernel of the elliptic frame.
class EllipticSpectralCurve : public SpectralCurve {
public:
  explicit EllipticSpectralCurve(EllipticFrame f, double scale = 1.0) : f_(std::move(f)), scale_(scale) {
    for (std::size_t i = 0; i < 2; ++i) argStar_[i] = resolvent_arg(f_.ustar[i], f_.q);
  }
  const EllipticFrame& frame() const { return f_; }
  std::vector<cplx> ramification() const override { return {f_.ustar[0], f_.ustar[1]}; }
  cplx X(cplx u, std::size_t i) const override { return std::log(x_of_u(u, f_) / std::exp(f_.logxStar[i])); }
  cplx dX(cplx u) const override { return dlogx(u, f_.q); }
  cplx d2X(cplx u) const override { return d2logx(u, f_.q); }
  cplx y(cplx u, std::size_t i) const override {
    return scale_ * kI / kSqrt3 * std::log(resolvent_arg(u, f_.q) / argStar_[i]);
  }
  cplx B(cplx u1, cplx u2) const override { return bergman_density(u1 - u2, f_.q, f_.tau); }
  double local_radius() const override { return std::sqrt(2 * f_.frakx); }

private:
  EllipticFrame f_;
  double scale_;
  std::array<cplx, 2> argStar_;
};

// Gaussian model: x = sqrt(t)(z + 1/z), y = sqrt(t)/z.
class GaussianSpectralCurve : public SpectralCurve {
public:
  explicit GaussianSpectralCurve(double t) : rt_(std::sqrt(t)) {}
  std::vector<cplx> ramification() const override { return {1.0, -1.0}; }
  cplx X(cplx u, std::size_t i) const override {
    cplx a = i == 0 ? 1.0 : -1.0;
    return rt_ * (u + 1.0 / u - a - 1.0 / a);
  }
  cplx dX(cplx u) const override { return rt_ * (1.0 - 1.0 / (u * u)); }
  cplx d2X(cplx u) const override { return rt_ * 2.0 / (u * u * u); }
  cplx y(cplx u, std::size_t i) const override {
    cplx a = i == 0 ? 1.0 : -1.0;
    return rt_ * (1.0 / u - 1.0 / a);
  }
  cplx B(cplx u1, cplx u2) const override { return 1.0 / ((u1 - u2) * (u1 - u2)); }
  double local_radius() const override { return 1.0; }

private:
  double rt_;
};

struct TrOptions {
  int nodes = 128;
  double innerFraction = 0.5;
  double outerFraction = 0.3;
};

namespace detail {

using CVec = std::vector<cplx>;

inline CVec convolve(const CVec& a, const CVec& b) {
  CVec r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

inline void axpy(CVec& acc, cplx c, const CVec& v) {
  if (acc.size() < v.size()) acc.resize(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += c * v[i];
}

// Taylor coefficients of 1/g.
inline CVec series_reciprocal(const CVec& g, std::size_t n) {
  if (std::abs(g[0]) < 1e-300) throw KernelPole("reciprocal of a series with vanishing constant term");
  CVec r(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s = k == 0 ? 1.0 : 0.0;
    for (std::size_t j = 1; j <= k && j < g.size(); ++j) s -= g[j] * r[k - j];
    r[k] = s / g[0];
  }
  return r;
}

// Newton solve of X(u, i) = target starting at guess.
inline cplx newton_X(const SpectralCurve& c, std::size_t i, cplx target, cplx u) {
  for (int it = 0; it < 30; ++it) {
    cplx du = (c.X(u, i) - target) / c.dX(u);
    u -= du;
    if (std::abs(du) < 1e-15) break;
  }
  return u;
}

} // namespace detail

// Local expansions at the ramification points: u(s), y(s), and the regular part of B.
class LocalData {
public:
  LocalData(std::shared_ptr<const SpectralCurve> curve, int kmax, TrOptions opt = {})
      : curve_(std::move(curve)), K_(kmax), opt_(opt) {
    ram_ = curve_->ramification();
    P_ = ram_.size();
    Mx_ = 2 * K_ + 6;
    const int N = opt_.nodes;
    if (N < 2 * (Mx_ + 2 * K_ + 4)) throw GridTooCoarse("node count too small for pole budget");
    double R = curve_->local_radius();
    r_ = {opt_.innerFraction * R, opt_.outerFraction * R};
    for (std::size_t i = 0; i < P_; ++i)
      if (std::abs(curve_->d2X(ram_[i])) < 1e-12) throw DegenerateRamification("second derivative of x vanishes");
    Eigen::FFT<double> fft;
    s_.resize(P_);
    u_.resize(P_);
    du_.resize(P_);
    for (std::size_t i = 0; i < P_; ++i) {
      for (int ring = 0; ring < 2; ++ring) {
        detail::CVec S(N), U(N), dU(N);
        for (int n = 0; n < N; ++n) {
          S[n] = std::polar(r_[ring], 2 * kPi * n / N);
          U[n] = solve_u(i, S[n]);
          dU[n] = 2.0 * S[n] / curve_->dX(U[n]);
        }
        s_[i][ring] = S;
        u_[i][ring] = U;
        du_[i][ring] = dU;
      }
      detail::CVec yv(N), yc;
      for (int n = 0; n < N; ++n) yv[n] = curve_->y(u_[i][0][n], i);
      fft.fwd(yc, yv);
      for (int n = 0; n < N; ++n) yc[n] /= double(N) * std::pow(r_[0], n);
      y_.push_back(yc);
      detail::CVec uc;
      fft.fwd(uc, u_[i][0]);
      for (int n = 0; n < N; ++n) uc[n] /= double(N) * std::pow(r_[0], n);
      uc[0] = ram_[i];
      ucoef_.push_back(uc);
    }
    rows_ = static_cast<std::size_t>(Mx_ + 2 * K_ + 4);
    cols_ = static_cast<std::size_t>(2 * K_ + 2);
    for (std::size_t i = 0; i < P_; ++i)
      for (std::size_t l = 0; l < P_; ++l) h_[{i, l}] = regular_part(i, l, fft);
    off_ = -(2 * K_ + 2);
    L_ = static_cast<std::size_t>(Mx_ - off_);
    for (std::size_t i = 0; i < P_; ++i)
      for (std::size_t l = 0; l < P_; ++l)
        for (int k = 0; k <= K_; ++k) {
          detail::CVec v(L_, 0.0);
          if (i == l) v[static_cast<std::size_t>(-2 * k - 2 - off_)] += 1.0;
          const auto& H = h_.at({i, l});
          for (int j = 0; j < Mx_; ++j) v[static_cast<std::size_t>(j - off_)] += H[static_cast<std::size_t>(j)][static_cast<std::size_t>(2 * k)] / double(2 * k + 1);
          basis_[{i, l, k}] = v;
        }
  }

  cplx solve_u(std::size_t i, cplx s) const {
    cplx u0 = ram_[i];
    cplx a = std::sqrt(curve_->d2X(u0) / 2.0);
    cplx u = u0 + 0.1 * s / a;
    for (int step = 1; step <= 10; ++step) {
      double fr = 0.1 * step;
      u = detail::newton_X(*curve_, i, (fr * s) * (fr * s), u);
    }
    return u;
  }

  const SpectralCurve& curve() const { return *curve_; }
  std::size_t points() const { return P_; }
  int kmax() const { return K_; }
  int offset() const { return off_; }
  std::size_t length() const { return L_; }
  cplx ramification(std::size_t i) const { return ram_[i]; }
  const detail::CVec& y_coeffs(std::size_t i) const { return y_[i]; }
  const detail::CVec& u_coeffs(std::size_t i) const { return ucoef_[i]; }
  const std::vector<detail::CVec>& h(std::size_t i, std::size_t l) const { return h_.at({i, l}); }
  // Laurent expansion at point i (offset `offset()`) of the basis differential xi_{l,k}.
  const detail::CVec& basis(std::size_t i, std::size_t l, int k) const { return basis_.at({i, l, k}); }
  double inner_radius() const { return r_[0]; }

  // xi_{l,k}(p) du at a point p outside the discs.
  cplx basis_global(cplx p, std::size_t l, int k) const {
    const auto& S = s_[l][1];
    const auto& U = u_[l][1];
    const auto& dU = du_[l][1];
    cplx acc = 0.0;
    for (std::size_t n = 0; n < S.size(); ++n) acc += curve_->B(p, U[n]) * dU[n] * std::pow(S[n], -2 * k);
    return acc / double(S.size()) / double(2 * k + 1);
  }

private:
  std::vector<detail::CVec> regular_part(std::size_t i, std::size_t l, Eigen::FFT<double>& fft) const {
    const int N = opt_.nodes;
    std::vector<detail::CVec> M(static_cast<std::size_t>(N), detail::CVec(static_cast<std::size_t>(N)));
    for (int p = 0; p < N; ++p)
      for (int q = 0; q < N; ++q) {
        cplx v = curve_->B(u_[i][0][p], u_[l][1][q]) * du_[i][0][p] * du_[l][1][q];
        if (i == l) {
          cplx d = s_[i][0][p] - s_[l][1][q];
          v -= 1.0 / (d * d);
        }
        M[p][q] = v;
      }
    for (auto& row : M) {
      detail::CVec out;
      fft.fwd(out, row);
      row = out;
    }
    std::vector<detail::CVec> H(rows_, detail::CVec(cols_));
    detail::CVec col(static_cast<std::size_t>(N)), out;
    for (std::size_t m = 0; m < cols_; ++m) {
      for (int p = 0; p < N; ++p) col[p] = M[p][m];
      fft.fwd(out, col);
      for (std::size_t j = 0; j < rows_; ++j)
        H[j][m] = out[j] / (double(N) * N * std::pow(r_[0], double(j)) * std::pow(r_[1], double(m)));
    }
    return H;
  }

  std::shared_ptr<const SpectralCurve> curve_;
  int K_;
  TrOptions opt_;
  std::vector<cplx> ram_;
  std::size_t P_ = 0;
  int Mx_ = 0, off_ = 0;
  std::size_t L_ = 0, rows_ = 0, cols_ = 0;
  std::array<double, 2> r_{};
  std::vector<std::array<detail::CVec, 2>> s_, u_, du_;
  std::vector<detail::CVec> y_, ucoef_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<detail::CVec>> h_;
  std::map<std::tuple<std::size_t, std::size_t, int>, detail::CVec> basis_;
};

// omega_{g,n} = sum_A coeff[A] xi_{A_1} ... xi_{A_n}, A_j = (point, k) flattened.
class TopologicalRecursion {
public:
  explicit TopologicalRecursion(std::shared_ptr<const LocalData> loc) : loc_(std::move(loc)) {
    P_ = loc_->points();
    K_ = loc_->kmax();
    for (std::size_t l = 0; l < P_; ++l)
      for (int k = 0; k <= K_; ++k) idx_.push_back({l, k});
    D_ = idx_.size();
    for (std::size_t i = 0; i < P_; ++i) {
      const auto& y = loc_->y_coeffs(i);
      std::size_t n = static_cast<std::size_t>(2 * K_ + 7);
      detail::CVec dd(n, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        if ((j + 1) % 2 == 1) dd[j] = 4.0 * y[j + 1];
      dinv_.push_back(detail::series_reciprocal(dd, n));
    }
  }

  const LocalData& local() const { return *loc_; }
  std::size_t dimension() const { return D_; }
  std::pair<std::size_t, int> index(std::size_t a) const { return idx_[a]; }

  const std::vector<cplx>& coefficients(int g, int n) {
    if (2 * g - 2 + n <= 0 || n < 1) throw KernelPole("unstable (g, n)");
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (auto it = A_.find({g, n}); it != A_.end()) return it->second;
    std::vector<cplx> res(ipow(D_, n), 0.0);
    const int off = loc_->offset();
    const std::size_t L = loc_->length();
    std::size_t nI = ipow(D_, n - 1);
    std::vector<std::size_t> I(static_cast<std::size_t>(n - 1));
    for (std::size_t flat = 0; flat < nI; ++flat) {
      unflatten(flat, I);
      for (std::size_t i = 0; i < P_; ++i) {
        detail::CVec f(2 * L - 1, 0.0);
        if (g >= 1 && !(g - 1 == 0 && n + 1 < 3)) {
          const auto& A2 = coefficients(g - 1, n + 1);
          for (std::size_t a = 0; a < D_; ++a) {
            detail::CVec V(L, 0.0);
            bool any = false;
            for (std::size_t b = 0; b < D_; ++b) {
              std::vector<std::size_t> key{a, b};
              key.insert(key.end(), I.begin(), I.end());
              cplx c = A2[flatten(key)];
              if (c == 0.0) continue;
              detail::axpy(V, c, cser(i, b, true));
              any = true;
            }
            if (any) detail::axpy(f, 1.0, detail::convolve(cser(i, a, false), V));
          }
        }
        if (g == 1 && n == 1) {
          // omega_{0,2}(s, -s) at the same point
          const auto& H = loc_->h(i, i);
          int off2 = 2 * off;
          f[static_cast<std::size_t>(-2 - off2)] += -0.25;
          for (std::size_t j = 0; j < H.size(); ++j)
            for (std::size_t m = 0; m < H[j].size(); ++m) {
              std::size_t e = j + m - static_cast<std::size_t>(off2);
              if (e < f.size()) f[e] += -H[j][m] * ((m & 1) ? -1.0 : 1.0);
            }
        }
        const std::size_t rest = static_cast<std::size_t>(n - 1);
        for (int h = 0; h <= g; ++h)
          for (std::size_t mask = 0; mask < (std::size_t{1} << rest); ++mask) {
            std::vector<std::size_t> J, Jc;
            for (std::size_t x = 0; x < rest; ++x) ((mask >> x) & 1 ? J : Jc).push_back(I[x]);
            if ((h == 0 && J.empty()) || (h == g && Jc.empty())) continue;
            detail::CVec U = useries(i, h, J, false), Ub = useries(i, g - h, Jc, true);
            detail::axpy(f, 1.0, detail::convolve(U, Ub));
          }
        detail::CVec fd = detail::convolve(f, dinv_[i]);
        for (int k = 0; k <= K_; ++k) {
          std::size_t e = static_cast<std::size_t>(-2 * k - 2 * off);
          std::vector<std::size_t> key{i * static_cast<std::size_t>(K_ + 1) + static_cast<std::size_t>(k)};
          key.insert(key.end(), I.begin(), I.end());
          res[flatten(key)] = e < fd.size() ? fd[e] : 0.0;
        }
      }
    }
    return A_.emplace(std::pair{g, n}, std::move(res)).first->second;
  }

  // Density of omega_{g,n} in du_1...du_n at points away from the ramification discs.
  cplx omega(int g, const std::vector<cplx>& pts) {
    int n = static_cast<int>(pts.size());
    if (g == 0 && n == 2) return loc_->curve().B(pts[0], pts[1]);
    const auto& A = coefficients(g, n);
    std::vector<std::vector<cplx>> xi(pts.size(), std::vector<cplx>(D_));
    for (std::size_t j = 0; j < pts.size(); ++j)
      for (std::size_t a = 0; a < D_; ++a) xi[j][a] = loc_->basis_global(pts[j], idx_[a].first, idx_[a].second);
    cplx acc = 0.0;
    std::vector<std::size_t> I(pts.size());
    for (std::size_t flat = 0; flat < A.size(); ++flat) {
      if (A[flat] == 0.0) continue;
      unflatten(flat, I);
      cplx p = A[flat];
      for (std::size_t j = 0; j < I.size(); ++j) p *= xi[j][I[j]];
      acc += p;
    }
    return acc;
  }

  // Local Laurent expansion of omega_{g,1} at point i, offset `local().offset()`.
  detail::CVec omega1_local(int g, std::size_t i) {
    const auto& A = coefficients(g, 1);
    detail::CVec v(loc_->length(), 0.0);
    for (std::size_t a = 0; a < D_; ++a) detail::axpy(v, A[a], cser(i, a, false));
    return v;
  }

  // (1/(2-2g)) sum_i Res Phi omega_{g,1}, Phi(u) = Phi(u_i) + int_{u_i}^u y dX.
  cplx free_energy(int g, const std::vector<cplx>& primitiveAtPoints = {}) {
    if (g < 2) throw MissingLowerGenus("free energy by residues needs g >= 2");
    cplx tot = 0.0;
    const int off = loc_->offset();
    for (std::size_t i = 0; i < P_; ++i) {
      detail::CVec w = omega1_local(g, i);
      const auto& y = loc_->y_coeffs(i);
      // Phi(s) - Phi(0) = sum_j 2 y_j s^{j+2}/(j+2), j >= 1
      cplx phi0 = i < primitiveAtPoints.size() ? primitiveAtPoints[i] : 0.0;
      cplx res = 0.0;
      auto wcoef = [&](int e) -> cplx {
        int idx = e - off;
        return idx >= 0 && idx < static_cast<int>(w.size()) ? w[static_cast<std::size_t>(idx)] : 0.0;
      };
      res += phi0 * wcoef(-1);
      for (int j = 1; j + 3 <= -off; ++j) res += 2.0 * y[static_cast<std::size_t>(j)] / double(j + 2) * wcoef(-j - 3);
      tot += res;
    }
    return tot / double(2 - 2 * g);
  }

private:
  static std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
  }
  std::size_t flatten(const std::vector<std::size_t>& key) const {
    std::size_t r = 0;
    for (std::size_t k : key) r = r * D_ + k;
    return r;
  }
  void unflatten(std::size_t flat, std::vector<std::size_t>& out) const {
    for (std::size_t j = out.size(); j-- > 0;) {
      out[j] = flat % D_;
      flat /= D_;
    }
  }
  // xi_a at point i, or its image under s -> -s (with the sign of the differential).
  detail::CVec cser(std::size_t i, std::size_t a, bool bar) const {
    detail::CVec v = loc_->basis(i, idx_[a].first, idx_[a].second);
    if (!bar) return v;
    const int off = loc_->offset();
    for (std::size_t j = 0; j < v.size(); ++j) {
      int e = static_cast<int>(j) + off;
      if ((e & 1) == 0) v[j] = -v[j];
    }
    return v;
  }
  // principal part of omega_{0,2}(s, p_a) at i
  detail::CVec bser(std::size_t i, std::size_t a, bool bar) const {
    detail::CVec v(loc_->length(), 0.0);
    auto [l, k] = idx_[a];
    if (l == i) v[static_cast<std::size_t>(2 * k - loc_->offset())] = double(2 * k + 1) * (bar ? -1.0 : 1.0);
    return v;
  }
  detail::CVec useries(std::size_t i, int h, const std::vector<std::size_t>& J, bool bar) {
    int m = static_cast<int>(J.size()) + 1;
    if (h == 0 && m == 2) return bser(i, J[0], bar);
    const auto& A = coefficients(h, m);
    detail::CVec v(loc_->length(), 0.0);
    for (std::size_t a = 0; a < D_; ++a) {
      std::vector<std::size_t> key{a};
      key.insert(key.end(), J.begin(), J.end());
      cplx c = A[flatten(key)];
      if (c != 0.0) detail::axpy(v, c, cser(i, a, bar));
    }
    return v;
  }

  std::shared_ptr<const LocalData> loc_;
  std::size_t P_ = 0, D_ = 0;
  int K_ = 0;
  std::vector<std::pair<std::size_t, int>> idx_;
  std::vector<detail::CVec> dinv_;
  std::map<std::pair<int, int>, std::vector<cplx>> A_;
  std::recursive_mutex mu_;
};

inline int tr_kmax(int g) { return std::max(3 * g - 2, 1); }

// Deck involution at ramification point `which` (0: zeta - tau/2, 1: -zeta - tau/2) as a series in h = u - u*.
struct DeckSeries {
  cplx center;
  std::vector<cplx> coeffs; // sigma(u* + h) = u* + sum_{j>=1} coeffs[j] h^j
  cplx operator()(cplx u) const {
    cplx h = u - center, acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 1;) acc = (acc + coeffs[j]) * h;
    return center + acc;
  }
};

namespace detail {

// Compose a(b(h)) for b(0) = 0, truncated to n terms.
inline CVec compose_series(const CVec& a, const CVec& b, std::size_t n) {
  CVec r(n, 0.0), p(n, 0.0);
  p[0] = 1.0;
  for (std::size_t k = 0; k < a.size() && k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) r[j] += a[k] * p[j];
    CVec np(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (p[i] != 0.0)
        for (std::size_t j = 1; i + j < n && j < b.size(); ++j) np[i + j] += p[i] * b[j];
    p = np;
  }
  return r;
}

// Inverse of b(h) with b(0) = 0, b'(0) != 0, by fixed-point iteration.
inline CVec revert_series(const CVec& b, std::size_t n) {
  CVec r(n, 0.0);
  r[1] = 1.0 / b[1];
  for (std::size_t it = 2; it < n; ++it) {
    CVec c = compose_series(b, r, n);
    // c(h) = h + e_it h^it + ...
    r[it] -= c[it] / b[1];
  }
  return r;
}

} // namespace detail

inline DeckSeries deck_involution(const EllipticFrame& f, int which, std::size_t terms = 16) {
  auto curve = std::make_shared<EllipticSpectralCurve>(f);
  if (std::abs(curve->d2X(f.ustar[static_cast<std::size_t>(which)])) < 1e-12)
    throw DegenerateRamification("x'' vanishes at the ramification point");
  LocalData loc(curve, 1, {64, 0.5, 0.3});
  const auto& uc = loc.u_coeffs(static_cast<std::size_t>(which));
  detail::CVec hs(terms, 0.0), um(terms, 0.0);
  for (std::size_t j = 1; j < terms; ++j) {
    hs[j] = uc[j];
    um[j] = (j & 1) ? -uc[j] : uc[j];
  }
  detail::CVec sOfH = detail::revert_series(hs, terms);
  detail::CVec sig = detail::compose_series(um, sOfH, terms);
  DeckSeries d{f.ustar[static_cast<std::size_t>(which)], sig};
  // verify on a ring
  double rho = 0.15 * loc.inner_radius() * std::abs(uc[1]);
  for (int k = 0; k < 16; ++k) {
    cplx u = d.center + std::polar(rho, 2 * kPi * k / 16);
    if (std::abs(x_of_u(d(u), f) - x_of_u(u, f)) > 1e-10)
      throw DegenerateRamification("deck series does not preserve x on the test ring");
  }
  return d;
}

// Other preimage of x(u) near ramification point i.
inline cplx deck_point(const SpectralCurve& c, std::size_t i, cplx u) {
  cplx us = c.ramification()[i];
  return detail::newton_X(c, i, c.X(u, i), 2.0 * us - u);
}

// K(u0, u) as a density in du0 / du.
inline cplx recursion_kernel(cplx u0, cplx u, const EllipticFrame& f, double scale = 1.0) {
  EllipticSpectralCurve c(f, scale);
  std::size_t i = std::abs(u - f.ustar[0]) < std::abs(u - f.ustar[1]) ? 0 : 1;
  if (std::abs(u - f.ustar[i]) < 1e-6) throw KernelPole("u too close to the ramification point");
  cplx su = deck_point(c, i, u);
  cplx num = theta1_logderiv(u0 - u, f.q) - theta1_logderiv(u0 - su, f.q);
  cplx den = (c.y(u, i) - c.y(su, i)) * c.dX(u);
  return 0.5 * num / den;
}

// Kernel as a density in du0 / ds in the local coordinate s at point i; odd in s.
inline cplx recursion_kernel_local(cplx u0, std::size_t i, cplx s, const LocalData& loc) {
  const SpectralCurve& c = loc.curve();
  cplx up = loc.solve_u(i, s), um = loc.solve_u(i, -s);
  const auto* ec = dynamic_cast<const EllipticSpectralCurve*>(&c);
  if (!ec) throw KernelPole("local kernel requires the elliptic curve");
  double q = ec->frame().q;
  cplx integral = theta1_logderiv(u0 - up, q) - theta1_logderiv(u0 - um, q);
  cplx den = (c.y(up, i) - c.y(um, i)) * 2.0 * s;
  if (std::abs(den) < 1e-300) throw KernelPole("vanishing denominator");
  return 0.5 * integral / den;
}

// Denominator (omega01(u) - omega01(sigma u)) / du.
inline cplx kernel_denominator(cplx u, const EllipticFrame& f) {
  EllipticSpectralCurve c(f);
  std::size_t i = std::abs(u - f.ustar[0]) < std::abs(u - f.ustar[1]) ? 0 : 1;
  cplx su = deck_point(c, i, u);
  return (c.y(u, i) - c.y(su, i)) * c.dX(u);
}

// int_{anchor}^{u*_i} R01 dlog x along a straight path, Gauss-Legendre.
inline cplx primitive_omega01(cplx anchor, cplx target, const EllipticFrame& f) {
  cplx dir = target - anchor;
  cplx base = continue_log_arg(cplx(-1.0 / 6, 0.0), anchor, 0.0, f.q);
  auto integrand = [&](double t, bool imagPart) {
    cplx u = anchor + t * dir;
    cplx L = continue_log_arg(anchor, u, base, f.q, 64);
    cplx v = kI / kSqrt3 * L * dlogx(u, f.q) * dir;
    return imagPart ? v.imag() : v.real();
  };
  using G = boost::math::quadrature::gauss<double, 40>;
  double re = G::integrate([&](double t) { return integrand(t, false); }, 0.0, 1.0);
  double im = G::integrate([&](double t) { return integrand(t, true); }, 0.0, 1.0);
  return {re, im};
}

struct FreeEnergyResult {
  cplx value;
  double doublingDeviation = 0.0;
};

inline std::unique_ptr<TopologicalRecursion> build_recursion(const EllipticFrame& f, int g, TrOptions opt = {},
                                                             double scale = 1.0) {
  auto curve = std::make_shared<EllipticSpectralCurve>(f, scale);
  auto loc = std::make_shared<LocalData>(curve, tr_kmax(g), opt);
  return std::make_unique<TopologicalRecursion>(loc);
}

// F_g with a node-doubling check.
inline FreeEnergyResult free_energy(int g, const EllipticFrame& f, TrOptions opt = {}, bool checkDoubling = true,
                                    double scale = 1.0) {
  FreeEnergyResult r;
  r.value = build_recursion(f, g, opt, scale)->free_energy(g);
  if (checkDoubling) {
    TrOptions o2 = opt;
    o2.nodes *= 2;
    cplx v2 = build_recursion(f, g, o2, scale)->free_energy(g);
    r.doublingDeviation = std::abs(v2 - r.value) / std::abs(v2);
    if (r.doublingDeviation > 1e-8)
      throw QuadratureNonConvergent("node doubling changes F_" + std::to_string(g) + " by " +
                                    std::to_string(r.doublingDeviation));
    r.value = v2;
  }
  return r;
}

struct CrosscheckRow {
  int g = 0;
  double q = 0, t = 0, dFdt_tr = 0, dFdt_hae = 0, rel_dev = 0;
};

// d/dt_CF of GW_g in the conifold frame, evaluated from its exact Laurent series.
class ConifoldDerivative {
public:
  ConifoldDerivative(int g, int order = 60, HaeSolver& solver = shared_hae()) {
    const auto& P = solver.potential(g);
    Series s = conifold_laurent(P.terms, std::nullopt, order);
    off_ = s.offset();
    for (int e = s.offset(); e < s.order(); ++e) c_.push_back(Rational(s[e]).get_d());
  }
  double value(double tcf) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < c_.size(); ++j) acc += c_[j] * std::pow(tcf, off_ + static_cast<int>(j));
    return acc;
  }
  double derivative(double tcf) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < c_.size(); ++j) {
      int e = off_ + static_cast<int>(j);
      if (e) acc += e * c_[j] * std::pow(tcf, e - 1);
    }
    return acc;
  }

private:
  int off_ = 0;
  std::vector<double> c_;
};

// Compares dF_g/dt from the recursion with 9 27^{g-1} dGW_g^CF/dt_CF at t_CF = 9t.
inline std::vector<CrosscheckRow> crosscheck_gap(int g, const std::vector<double>& qlist, TrOptions opt = {},
                                                 HaeSolver& solver = shared_hae()) {
  if (qlist.empty()) throw GridTooCoarse("empty q list");
  ConifoldDerivative hae(g, 60, solver);
  double factor = 9 * std::pow(27.0, g - 1);
  std::vector<CrosscheckRow> rows;
  for (double q : qlist) {
    double h = 0.002 * q;
    if (q - 2 * h <= 0 || q + 2 * h > 0.2) throw GridTooCoarse("stencil leaves the validated nome range");
    // five-point stencil in q
    std::array<double, 4> off{-2, -1, 1, 2};
    std::array<double, 4> Fv{}, tv{};
    for (std::size_t k = 0; k < 4; ++k) {
      EllipticFrame f = lattice_solve(q + off[k] * h);
      Fv[k] = free_energy(g, f, opt, false).value.real();
      tv[k] = f.tHooft;
    }
    auto d5 = [&](const std::array<double, 4>& v) { return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h); };
    CrosscheckRow r;
    r.g = g;
    r.q = q;
    r.t = lattice_solve(q).tHooft;
    r.dFdt_tr = d5(Fv) / d5(tv);
    r.dFdt_hae = factor * hae.derivative(9 * r.t);
    r.rel_dev = std::abs(r.dFdt_tr - r.dFdt_hae) / std::abs(r.dFdt_hae);
    rows.push_back(r);
  }
  return rows;
}

} // namespace conigap

#endif
