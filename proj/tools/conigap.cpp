// Command-line front end: gw, gap, series, elliptic, tr-check, simulate, verify-all.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <conigap/coulomb.hpp>
#include <conigap/elliptic.hpp>
#include <conigap/hae.hpp>
#include <conigap/mirror.hpp>
#include <conigap/tr.hpp>

#include "acceptance/criteria.hpp"

using nlohmann::json;

namespace {

struct RunConfig {
  std::uint64_t seed = 20240901;
  std::string output;
  int order = 0; // 0 = subcommand default
  int genus = 0;
  int dmax = 0;
  std::string seriesName;
  double q = 0.0;
  bool report = false;
  std::vector<double> qlist;
  int N = 64;
  double t = 0.1;
  long sweeps = 1'000'000;
  long burnin = 20'000;
  int chains = 1;
  int bins = 60;
  double proposalScale = 0.05;
  std::string csv;
};

// JSON writer with floats at 17 significant digits.
void write_json(std::ostream& os, const json& j, int indent, int depth) {
  auto pad = [&](int d) { os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' '); };
  switch (j.type()) {
  case json::value_t::object: {
    if (j.empty()) { os << "{}"; break; }
    os << '{';
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ',';
      first = false;
      pad(depth + 1);
      os << json(it.key()).dump() << ": ";
      write_json(os, it.value(), indent, depth + 1);
    }
    pad(depth);
    os << '}';
    break;
  }
  case json::value_t::array: {
    if (j.empty()) { os << "[]"; break; }
    os << '[';
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) os << ',';
      pad(depth + 1);
      write_json(os, j[i], indent, depth + 1);
    }
    pad(depth);
    os << ']';
    break;
  }
  case json::value_t::number_float: {
    double v = j.get<double>();
    if (!std::isfinite(v)) { os << "null"; break; }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    os << s;
    break;
  }
  default:
    os << j.dump();
  }
}

std::string dump(const json& j) {
  std::ostringstream os;
  write_json(os, j, 2, 0);
  os << '\n';
  return os.str();
}

void emit(const RunConfig& rc, const std::string& text) {
  if (rc.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(rc.output);
  if (!f) throw conigap::Error("cannot write " + rc.output);
  f << text;
}

json rat(const conigap::Rational& r) { return conigap::rational_to_string(r); }

int cmd_gw(const RunConfig& rc) {
  json rows = json::array();
  for (const auto& r : conigap::gw_invariants(rc.genus, rc.dmax))
    rows.push_back({{"g", r.g}, {"d", r.d}, {"N", rat(r.N)}});
  emit(rc, dump(rows));
  return 0;
}

int cmd_gap(const RunConfig& rc) {
  using namespace conigap;
  const int g = rc.genus;
  const int order = rc.order ? rc.order : 2 * (2 * g - 2);
  auto [amb, P] = shared_hae().fix_ambiguity(g);
  Series L = conifold_laurent(P.terms, std::nullopt, order);
  GapTarget tgt = gap_target(g);
  bool ok = L[2 - 2 * g] == tgt.leading;
  json polar = json::array();
  for (int e = 3 - 2 * g; e <= -1; ++e) {
    polar.push_back(rat(L[e]));
    ok = ok && sgn(L[e]) == 0;
  }
  bool regular = true;
  for (const auto& [key, v] : P.terms.terms()) regular = regular && in_regularity_span(g, key.first, key.second);
  json ambiguity = json::array();
  for (const auto& a : amb.a) ambiguity.push_back(rat(a));
  json out{{"genus", g},
           {"leading", rat(L[2 - 2 * g])},
           {"expected", rat(tgt.leading)},
           {"polar", polar},
           {"ambiguity", ambiguity},
           {"regular", regular},
           {"order", order},
           {"gap_verified", ok && regular}};
  emit(rc, dump(out));
  return ok && regular ? 0 : 1;
}

int cmd_series(const RunConfig& rc) {
  using namespace conigap;
  const int order = rc.order ? rc.order : 10;
  const std::string& n = rc.seriesName;
  Series s;
  if (n == "C" || n == "X" || n == "F" || n == "Q" || n == "qLR") {
    LargeRadiusPack p = generators_LR(order + 1);
    s = n == "C" ? p.C : n == "X" ? p.X : n == "F" ? p.F : n == "Q" ? p.Q_of_y : p.qLR_of_y;
  } else {
    ConifoldFramePack p = frobenius_conifold(order + 2);
    s = n == "tCF" ? p.tCF_of_w : n == "qCF" ? p.qCF_of_tCF : p.F_CF;
  }
  if (s.order() > order) s = s.truncated(order);
  emit(rc, dump(to_json(s)));
  return 0;
}

int cmd_elliptic(const RunConfig& rc) {
  using namespace conigap;
  EllipticFrame f = lattice_solve(rc.q);
  json out{{"q", f.q},
           {"tau", f.tau.imag()},
           {"zeta", f.zeta},
           {"frakx", f.frakx},
           {"t", f.tHooft},
           {"x_plus", f.xplus},
           {"x_minus", f.xminus}};
  if (rc.report) {
    double qp = 0.0;
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) {
        cplx u = cplx(-0.4 + 0.2 * a, 0.0) + (-0.4 + 0.2 * b) * f.tau;
        if (detail::lattice_distance(u, 1.0 / 6, f.tau) < 1e-3 || detail::lattice_distance(u, -1.0 / 6, f.tau) < 1e-3) continue;
        qp = std::max(qp, std::abs(x_of_u(u + f.tau, f) / x_of_u(u, f) - f.phi3 * f.phi3));
        qp = std::max(qp, std::abs(x_of_u(u + 1.0, f) / x_of_u(u, f) - 1.0));
      }
    double br = 0.0;
    for (cplx u : {cplx(0.23, 0.07), cplx(0.05, -0.3), cplx(-0.31, 0.2)}) br = std::max(br, mirror_bridge(u, f).residual);
    out["checks"] = {{"t_vs_exact_chain", std::abs(f.tHooft - f.tSeries) / f.tHooft},
                     {"quasi_periodicity", qp},
                     {"mirror_curve_residual", br},
                     {"density_mass_error", std::abs(density_mass(f) - 1.0)},
                     {"x_at_0", x_of_u(0.0, f).real()},
                     {"x_at_half", x_of_u(0.5, f).real()}};
  }
  emit(rc, dump(out));
  return 0;
}

int cmd_tr_check(const RunConfig& rc) {
  json rows = json::array();
  for (const auto& r : conigap::crosscheck_gap(rc.genus, rc.qlist))
    rows.push_back({{"g", r.g}, {"q", r.q}, {"t", r.t}, {"dFdt_tr", r.dFdt_tr}, {"dFdt_hae", r.dFdt_hae}, {"rel_dev", r.rel_dev}});
  emit(rc, dump(rows));
  return 0;
}

int cmd_simulate(const RunConfig& rc) {
  using namespace conigap;
  EnsembleConfig cfg;
  cfg.N = rc.N;
  cfg.t = rc.t;
  cfg.burnin = rc.burnin;
  cfg.sweeps = rc.burnin + rc.sweeps;
  cfg.seed = rc.seed;
  cfg.chains = rc.chains;
  cfg.proposalScale = rc.proposalScale;
  cfg.validate();
  EmpiricalSpectrum sp = metropolis_run(cfg, rc.bins);
  SpectrumReport r = spectrum_stats(sp, frame_for_t(cfg.t));
  if (!rc.csv.empty()) {
    std::ofstream f(rc.csv);
    if (!f) throw Error("cannot write " + rc.csv);
    f << "bin_left,bin_right,count,density\n";
    char buf[160];
    const double total = double(sp.sorted.size());
    for (std::size_t b = 0; b < sp.counts.size(); ++b) {
      double lo = sp.binEdges[b], hi = sp.binEdges[b + 1];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%ld,%.17g\n", lo, hi, sp.counts[b], sp.counts[b] / (total * (hi - lo)));
      f << buf;
    }
  }
  json out{{"N", r.N}, {"t", r.t}, {"ks", r.ks}, {"edge_err_lo", r.edge_err_lo}, {"edge_err_hi", r.edge_err_hi}, {"acceptance", r.acceptance}};
  emit(rc, dump(out));
  return 0;
}

int cmd_verify_all(const RunConfig& rc) {
  std::ostringstream log;
  int code = 0;
  for (const auto& c : conigap::acceptance::criteria()) {
    auto r = conigap::acceptance::run(c);
    std::cout << r.line() << std::endl;
    log << r.line() << '\n';
    if (!r.pass) {
      code = 1;
      break;
    }
  }
  if (!rc.output.empty()) emit(rc, log.str());
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"conigap: local P2 Gromov-Witten invariants, conifold gap and the eigenvalue ensemble"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  RunConfig rc;
  app.add_option("--seed", rc.seed, "random seed");
  app.add_option("--output,-o", rc.output, "write the result to this file instead of stdout");
  app.add_option("--order", rc.order, "truncation order override")->check(CLI::Range(1, 400));

  auto* gw = app.add_subcommand("gw", "Gromov-Witten invariants N_{g,d}");
  gw->add_option("--genus", rc.genus)->required()->check(CLI::Range(0, 8));
  gw->add_option("--dmax", rc.dmax)->required()->check(CLI::Range(1, 60));

  auto* gap = app.add_subcommand("gap", "fix the holomorphic ambiguity and check the conifold gap");
  gap->add_option("--genus", rc.genus)->required()->check(CLI::Range(2, 10));

  auto* series = app.add_subcommand("series", "emit a named series as JSON");
  series->add_option("--name", rc.seriesName)->required()->check(CLI::IsMember({"C", "X", "F", "Q", "qLR", "tCF", "qCF", "F_CF"}));

  auto* ell = app.add_subcommand("elliptic", "spectral torus data at nome q");
  ell->add_option("--q", rc.q)->required()->check(CLI::Range(1e-12, 0.2));
  ell->add_flag("--report", rc.report, "include residual checks");

  auto* tr = app.add_subcommand("tr-check", "recursion free energies against the anomaly-equation solution");
  tr->add_option("--genus", rc.genus)->required()->check(CLI::Range(2, 4));
  tr->add_option("--q", rc.qlist)->required()->delimiter(',')->check(CLI::Range(1e-4, 0.1));

  auto* sim = app.add_subcommand("simulate", "Metropolis sampling of the eigenvalue ensemble");
  sim->add_option("--N", rc.N)->check(CLI::Range(2, 4096));
  sim->add_option("--t", rc.t)->check(CLI::Range(1e-6, conigap::kConfinementBound));
  sim->add_option("--sweeps", rc.sweeps, "sweeps after burn-in")->check(CLI::Range(1L, 1'000'000'000L));
  sim->add_option("--burnin", rc.burnin)->check(CLI::Range(0L, 1'000'000'000L));
  sim->add_option("--chains", rc.chains)->check(CLI::Range(1, 256));
  sim->add_option("--bins", rc.bins)->check(CLI::Range(1, 10'000));
  sim->add_option("--proposal-scale", rc.proposalScale)->check(CLI::Range(1e-6, 10.0));
  sim->add_option("--out", rc.csv, "histogram CSV path");

  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite, stopping at the first failure");

  if (argc <= 1) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    if (*gw) return cmd_gw(rc);
    if (*gap) return cmd_gap(rc);
    if (*series) return cmd_series(rc);
    if (*ell) return cmd_elliptic(rc);
    if (*tr) return cmd_tr_check(rc);
    if (*sim) return cmd_simulate(rc);
    if (*verify) return cmd_verify_all(rc);
    std::cerr << app.help();
    return 2;
  } catch (const conigap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
