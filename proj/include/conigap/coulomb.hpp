#ifndef CONIGAP_COULOMB_HPP
#define CONIGAP_COULOMB_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

#include "elliptic.hpp"

namespace conigap {

inline const double kConfinementBound = 2 * kPi / (3 * kSqrt3);

struct EnsembleConfig {
  int N = 64;
  double t = 0.1;
  long sweeps = 1'000'000;
  long burnin = 20'000;
  double proposalScale = 0.05;
  std::uint64_t seed = 20240901;
  int chains = 1;
  long snapshots = 10'000; // recorded configurations per chain after burn-in

  void validate() const {
    if (N < 2) throw InvalidConfig("N must be at least 2");
    if (!(t > 0 && t < kConfinementBound)) throw InvalidConfig("t must lie in (0, 2 pi/(3 sqrt 3))");
    if (sweeps <= burnin || burnin < 0) throw InvalidConfig("sweeps must exceed burnin");
    if (!(proposalScale > 0)) throw InvalidConfig("proposalScale must be positive");
    if (chains < 1) throw InvalidConfig("chains must be at least 1");
    if (snapshots < 1) throw InvalidConfig("snapshots must be at least 1");
  }
};

struct SampleState {
  std::vector<double> x;
  double cachedLogWeight = 0.0;
};

struct EmpiricalSpectrum {
  std::vector<double> sorted;
  std::vector<double> binEdges;
  std::vector<long> counts;
  double edgeLo = 0.0, edgeHi = 0.0;
  double acceptance = 0.0;
  int N = 0;
  double t = 0.0;
};

namespace detail {

// 2 log|x - y| + 2 Lambda(x, y)
inline double pair_term(double x, double y) {
  double d = x - y;
  return std::log(d * d / (x * x + x * y + y * y));
}

inline double diagonal_term(double x) { return -0.5 * std::log(3 * x * x); }

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t chain_seed(std::uint64_t seed, int chain) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(chain) + 1));
}

inline int worker_count(int jobs) {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("CONIGAP_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::max(1, std::min(n, jobs));
}

} // namespace detail

inline double log_weight(const SampleState& s, const EnsembleConfig& cfg) {
  const auto& x = s.x;
  double w = 0.0;
  for (double xi : x) {
    if (!(xi > 0)) throw NonPositiveArgument("eigenvalues must be positive");
    w -= double(cfg.N) / cfg.t * potential_phi(xi).phi;
    w += detail::diagonal_term(xi);
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (std::abs(x[i] - x[j]) <= 1e-300 + 4 * std::numeric_limits<double>::epsilon() * std::max(x[i], x[j]))
        throw CoincidentEigenvalues("x_" + std::to_string(i) + " = x_" + std::to_string(j));
      w += detail::pair_term(x[i], x[j]);
    }
  return w;
}

inline SampleState initial_state(const EnsembleConfig& cfg) {
  SampleState s;
  double a = 2 * std::sqrt(cfg.t);
  for (int i = 0; i < cfg.N; ++i) s.x.push_back(std::exp(-a + 2 * a * (i + 0.5) / cfg.N));
  s.cachedLogWeight = log_weight(s, cfg);
  return s;
}

struct ChainResult {
  std::vector<double> samples;
  long accepted = 0, proposed = 0;
};

inline ChainResult run_chain(const EnsembleConfig& cfg, int chain) {
  std::mt19937_64 rng(detail::chain_seed(cfg.seed, chain));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SampleState s = initial_state(cfg);
  const double beta = double(cfg.N) / cfg.t;
  const std::size_t n = s.x.size();
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = potential_phi(s.x[i]).phi;
  const long post = cfg.sweeps - cfg.burnin;
  const long thin = std::max(1L, post / cfg.snapshots);
  ChainResult r;
  r.samples.reserve(static_cast<std::size_t>(post / thin + 1) * n);
  long windowAcc = 0, windowProp = 0;
  for (long sweep = 0; sweep < cfg.sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      double xo = s.x[i];
      double step = cfg.proposalScale * gauss(rng);
      double xn = xo * std::exp(step);
      // ratio of pair factors, logged in blocks to stay in range
      double delta = 0.0, prod = 1.0;
      int blk = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double y = s.x[j];
        double dn = xn - y, dd = xo - y;
        prod *= (dn * dn) * (xo * xo + xo * y + y * y) / ((dd * dd) * (xn * xn + xn * y + y * y));
        if (++blk == 8) {
          delta += std::log(prod);
          prod = 1.0;
          blk = 0;
        }
      }
      delta += std::log(prod);
      double pn = PotentialTable::instance().phi_of_Z(std::log(xn));
      delta += -beta * (pn - phi[i]) + detail::diagonal_term(xn) - detail::diagonal_term(xo);
      ++windowProp;
      if (std::log(unif(rng)) < delta + step) {
        s.x[i] = xn;
        phi[i] = pn;
        s.cachedLogWeight += delta;
        ++windowAcc;
        if (sweep >= cfg.burnin) ++r.accepted;
      }
      if (sweep >= cfg.burnin) ++r.proposed;
    }
    if ((sweep + 1) % 1000 == 0) {
      double fresh = log_weight(s, cfg);
      if (std::abs(fresh - s.cachedLogWeight) > 1e-6 * (1 + std::abs(fresh)))
        throw CoincidentEigenvalues("cached log-weight drifted from recomputed value");
      s.cachedLogWeight = fresh;
      if (double(windowAcc) < 0.01 * double(windowProp))
        throw AcceptanceCollapse("acceptance below 1% over 1000 sweeps");
      windowAcc = windowProp = 0;
    }
    if (sweep >= cfg.burnin && (sweep - cfg.burnin) % thin == 0) r.samples.insert(r.samples.end(), s.x.begin(), s.x.end());
  }
  return r;
}

// Edge by extrapolating tail quantiles with the square-root vanishing law: tail mass ~ c (edge - Z)^{3/2}.
inline double extrapolate_edge(const std::vector<double>& sortedLog, bool upper) {
  const double alphas[] = {0.004, 0.006, 0.008, 0.012, 0.016, 0.024, 0.032};
  std::vector<double> X, Y;
  std::size_t n = sortedLog.size();
  for (double a : alphas) {
    double pos = upper ? (1 - a) * (n - 1) : a * (n - 1);
    std::size_t k = static_cast<std::size_t>(pos);
    double fr = pos - k;
    double z = sortedLog[k] * (1 - fr) + sortedLog[std::min(k + 1, n - 1)] * fr;
    X.push_back(std::pow(a, 2.0 / 3));
    Y.push_back(z);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < X.size(); ++i) { mx += X[i]; my += Y[i]; }
  mx /= X.size();
  my /= X.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxy += (X[i] - mx) * (Y[i] - my);
    sxx += (X[i] - mx) * (X[i] - mx);
  }
  return my - sxy / sxx * mx;
}

inline EmpiricalSpectrum metropolis_run(const EnsembleConfig& cfg, int bins = 60) {
  cfg.validate();
  std::vector<ChainResult> res(static_cast<std::size_t>(cfg.chains));
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(cfg.chains));
  int workers = detail::worker_count(cfg.chains);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int c = w; c < cfg.chains; c += workers) {
        try {
          res[static_cast<std::size_t>(c)] = run_chain(cfg, c);
        } catch (...) {
          errs[static_cast<std::size_t>(c)] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  EmpiricalSpectrum sp;
  sp.N = cfg.N;
  sp.t = cfg.t;
  long acc = 0, prop = 0;
  for (auto& r : res) {
    sp.sorted.insert(sp.sorted.end(), r.samples.begin(), r.samples.end());
    acc += r.accepted;
    prop += r.proposed;
  }
  sp.acceptance = double(acc) / double(prop);
  std::sort(sp.sorted.begin(), sp.sorted.end());
  std::vector<double> logs(sp.sorted.size());
  std::transform(sp.sorted.begin(), sp.sorted.end(), logs.begin(), [](double v) { return std::log(v); });
  sp.edgeHi = std::exp(extrapolate_edge(logs, true));
  sp.edgeLo = std::exp(extrapolate_edge(logs, false));
  double lo = sp.sorted.front(), hi = sp.sorted.back(), width = (hi - lo) / bins;
  sp.counts.assign(static_cast<std::size_t>(bins), 0);
  for (int b = 0; b <= bins; ++b) sp.binEdges.push_back(lo + b * width);
  for (double v : sp.sorted) sp.counts[static_cast<std::size_t>(std::min(bins - 1, int((v - lo) / width)))]++;
  return sp;
}

// Analytic cumulative distribution of the equilibrium density, tabulated along the cut.
class AnalyticSpectrum {
public:
  explicit AnalyticSpectrum(const EllipticFrame& f, int cells = 200) : f_(f) {
    using G = boost::math::quadrature::gauss<double, 8>;
    auto integrand = [&](double v) {
      cplx u = cplx(v, 0.0) - 0.5 * f_.tau;
      double s = std::exp(std::log(x_of_u(u, f_)).real());
      return density_rho(s, f_) * s * dlogx(u, f_.q).real();
    };
    double h = 2 * f.zeta / cells;
    s_.push_back(f.xminus);
    F_.push_back(0.0);
    for (int c = 0; c < cells; ++c) {
      double a = -f.zeta + c * h, b = a + h;
      F_.push_back(F_.back() + G::integrate(integrand, a, b));
      s_.push_back(c + 1 == cells ? f.xplus : std::exp(std::log(x_of_u(cplx(b, 0.0) - 0.5 * f.tau, f)).real()));
    }
  }
  double cdf(double s) const {
    if (s <= s_.front()) return 0.0;
    if (s >= s_.back()) return 1.0;
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t k = static_cast<std::size_t>(it - s_.begin()) - 1;
    double fr = (s - s_[k]) / (s_[k + 1] - s_[k]);
    return F_[k] + fr * (F_[k + 1] - F_[k]);
  }
  double mass() const { return F_.back(); }

private:
  EllipticFrame f_;
  std::vector<double> s_, F_;
};

struct SpectrumReport {
  int N = 0;
  double t = 0, ks = 0, edge_err_lo = 0, edge_err_hi = 0, acceptance = 0;
};

inline SpectrumReport spectrum_stats(const EmpiricalSpectrum& sp, const EllipticFrame& f) {
  if (std::abs(f.tHooft - sp.t) > 1e-8 * sp.t) throw FrameMismatch("frame t differs from ensemble t");
  AnalyticSpectrum an(f);
  SpectrumReport r;
  r.N = sp.N;
  r.t = sp.t;
  r.acceptance = sp.acceptance;
  const double n = double(sp.sorted.size());
  double ks = 0.0;
  for (std::size_t k = 0; k < sp.sorted.size(); ++k) {
    double F = an.cdf(sp.sorted[k]);
    ks = std::max({ks, std::abs(F - k / n), std::abs(F - (k + 1) / n)});
  }
  r.ks = ks;
  double lx = std::log(f.xplus);
  r.edge_err_hi = std::abs(std::log(sp.edgeHi / f.xplus)) / lx;
  r.edge_err_lo = std::abs(std::log(sp.edgeLo / f.xminus)) / lx;
  return r;
}

} // namespace conigap

#endif
