#include "pie/cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pie/irl1.hpp"
#include "pie/oracle.hpp"
#include "pie/output.hpp"
#include "pie/params.hpp"
#include "pie/prox.hpp"

namespace pie {
namespace {

constexpr double kOracleProxTol = 1e-5;     // prox vs brute_force_prox gate
constexpr double kOracleTauBarTol = 1e-6;   // tau_bar vs brute_force_tau_bar gate

struct Grid {
  double lo = 0.0, hi = 0.0;
  long n = 0;
};

// Parse "lo:hi:n" with n inclusive endpoints.
bool parse_grid(const std::string& s, Grid& g, std::string& why) {
  std::istringstream in(s);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
    why = "expected lo:hi:n";
    return false;
  }
  try {
    size_t pos = 0;
    g.lo = std::stod(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(a);
    g.hi = std::stod(b, &pos);
    if (pos != b.size()) throw std::invalid_argument(b);
    g.n = std::stol(c, &pos);
    if (pos != c.size()) throw std::invalid_argument(c);
  } catch (const std::exception&) {
    why = "lo, hi must be numbers and n an integer";
    return false;
  }
  if (!(std::isfinite(g.lo) && std::isfinite(g.hi))) { why = "grid endpoints must be finite"; return false; }
  if (g.n < 1) { why = "n must be >= 1"; return false; }
  if (g.lo > g.hi) { why = "lo must be <= hi"; return false; }
  if (g.n == 1 && g.lo != g.hi) { why = "n = 1 requires lo == hi"; return false; }
  return true;
}

std::vector<double> grid_points(const Grid& g) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(g.n));
  if (g.n == 1) {
    out.push_back(g.lo);
    return out;
  }
  double h = (g.hi - g.lo) / static_cast<double>(g.n - 1);
  for (long i = 0; i < g.n; ++i)
    out.push_back(i == g.n - 1 ? g.hi : g.lo + h * static_cast<double>(i));
  return out;
}

// Parse a comma-separated list of positive iteration counts; sorted, deduped.
bool parse_k_list(const std::string& s, std::vector<long>& ks, std::string& why) {
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      size_t pos = 0;
      long k = std::stol(tok, &pos);
      if (pos != tok.size() || k < 1) throw std::invalid_argument(tok);
      ks.push_back(k);
    } catch (const std::exception&) {
      why = "expected a comma-separated list of integers >= 1";
      return false;
    }
  }
  if (ks.empty()) { why = "list is empty"; return false; }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return true;
}

std::string echo_command(int argc, const char* const* argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

void meta_common(OutputRecord& rec, const std::string& command, const Params& p) {
  rec.meta.emplace_back("tool", kToolName);
  rec.meta.emplace_back("version", kToolVersion);
  rec.meta.emplace_back("command", command);
  rec.meta.emplace_back("lambda", format_real(p.lambda));
  rec.meta.emplace_back("sigma", format_real(p.sigma));
  rec.meta.emplace_back("regime", p.regime() == Regime::SOFT ? "SOFT" : "HARD");
}

void emit(const OutputRecord& rec, const std::string& format, std::ostream& out) {
  out << (format == "json" ? render_json(rec) : render_csv(rec));
}

const char* kind_name(LimitKind k) {
  switch (k) {
    case LimitKind::ZERO: return "ZERO";
    case LimitKind::X1: return "X1";
    default: return "X2";
  }
}

int run_prox(const Params& p, double tau, bool with_oracle, const std::string& format,
             const std::string& command, std::ostream& out, std::ostream& err) {
  ProxResult r = prox(tau, p);
  bool hard = p.regime() == Regime::HARD;
  Thresholds th{};
  if (hard) th = tau_bar(p);

  OutputRecord rec;
  rec.schema = "PROX";
  meta_common(rec, command, p);
  rec.meta.emplace_back("tau", format_real(tau));
  rec.columns = {"index", "point", "regime", "at_tie", "lower", "tau_bar", "upper"};

  std::vector<double> oracle_pts;
  double max_disc = 0.0;
  bool oracle_fail = false;
  if (with_oracle) {
    oracle_pts = brute_force_prox(tau, p);
    rec.columns.push_back("oracle_point");
    rec.columns.push_back("discrepancy");
    if (oracle_pts.size() != r.points.size()) oracle_fail = true;
    for (size_t i = 0; i < std::min(oracle_pts.size(), r.points.size()); ++i)
      max_disc = std::fmax(max_disc, std::fabs(oracle_pts[i] - r.points[i]));
    if (max_disc > kOracleProxTol) oracle_fail = true;
    rec.meta.emplace_back("oracle_points", std::to_string(oracle_pts.size()));
    rec.meta.emplace_back("oracle_max_discrepancy", format_real(max_disc));
  }

  size_t nrows = std::max(r.points.size(), oracle_pts.size());
  for (size_t i = 0; i < nrows; ++i) {
    std::vector<Value> row;
    row.emplace_back(static_cast<long long>(i));
    row.emplace_back(i < r.points.size() ? Value(r.points[i]) : Value(std::monostate{}));
    row.emplace_back(std::string(hard ? "HARD" : "SOFT"));
    row.emplace_back(r.at_tie);
    row.emplace_back(hard ? Value(th.lower) : Value(p.lower_landmark()));
    row.emplace_back(hard ? Value(th.tau_bar) : Value(std::monostate{}));
    row.emplace_back(p.upper_landmark());
    if (with_oracle) {
      row.emplace_back(i < oracle_pts.size() ? Value(oracle_pts[i]) : Value(std::monostate{}));
      bool matched = i < oracle_pts.size() && i < r.points.size();
      row.emplace_back(matched ? Value(std::fabs(oracle_pts[i] - r.points[i]))
                               : Value(std::monostate{}));
    }
    rec.rows.push_back(std::move(row));
  }

  emit(rec, format, out);
  if (oracle_fail) {
    err << "oracle cross-check failed: closed form returned " << r.points.size()
        << " point(s), brute force " << oracle_pts.size()
        << ", max discrepancy " << format_real(max_disc) << "\n";
    return 3;
  }
  return 0;
}

int run_irl1(const Params& p, double tau, bool has_x0, double x0_flag, bool adaptive,
             double tol, long max_iter, const std::string& format,
             const std::string& command, std::ostream& out, std::ostream& err) {
  (void)err;
  double x0 = adaptive ? adaptive_init(tau, p) : x0_flag;
  (void)has_x0;
  Trajectory traj = irl1_run(x0, tau, p, tol, max_iter);
  LimitPrediction pred = predict_limit(x0, tau, p);

  bool limit_in_prox = false;
  for (double q : prox(tau, p).points)
    if (std::fabs(traj.limit - q) <= 1e-8) limit_in_prox = true;

  OutputRecord rec;
  rec.schema = "TRAJECTORY";
  meta_common(rec, command, p);
  rec.meta.emplace_back("tau", format_real(tau));
  rec.meta.emplace_back("x0", format_real(x0));
  rec.meta.emplace_back("init", adaptive ? "adaptive" : "explicit");
  rec.meta.emplace_back("tol", format_real(tol));
  rec.meta.emplace_back("max_iter", std::to_string(max_iter));
  rec.meta.emplace_back("limit", format_real(traj.limit));
  rec.meta.emplace_back("converged", traj.converged ? "true" : "false");
  rec.meta.emplace_back("iterations", std::to_string(traj.iterations));
  rec.meta.emplace_back("hit_zero_at",
                        traj.hit_zero_at ? std::to_string(*traj.hit_zero_at) : "");
  rec.meta.emplace_back("predicted_limit", format_real(pred.value));
  rec.meta.emplace_back("predicted_kind", kind_name(pred.kind));
  rec.meta.emplace_back("predicted_in_prox", pred.in_prox_set ? "true" : "false");
  rec.meta.emplace_back("limit_in_prox", limit_in_prox ? "true" : "false");

  rec.columns = {"k", "x"};
  for (const IterSample& s : traj.iterates)
    rec.rows.push_back({Value(static_cast<long long>(s.k)), Value(s.x)});

  emit(rec, format, out);
  return 0;
}

int run_region(const Params& p, const std::vector<double>& x0s, const std::string& format,
               const std::string& command, std::ostream& out) {
  OutputRecord rec;
  rec.schema = "REGION";
  meta_common(rec, command, p);
  rec.meta.emplace_back("L", format_real(p.lower_landmark()));
  rec.meta.emplace_back("M", format_real(p.mid_landmark()));
  rec.meta.emplace_back("U", format_real(p.upper_landmark()));
  if (p.regime() == Regime::HARD) {
    Thresholds th = tau_bar(p);
    rec.meta.emplace_back("tau_bar", format_real(th.tau_bar));
    rec.meta.emplace_back("x2_tau_bar", format_real(x2(th.tau_bar, p)));
  }

  rec.columns = {"x0", "case", "lo", "hi", "lo_closed", "hi_closed"};
  for (double x0 : x0s) {
    RegionReport report = deviation_region(x0, p);
    if (report.deviation_intervals.empty()) {
      rec.rows.push_back({Value(x0), Value(report.case_label), Value(std::monostate{}),
                          Value(std::monostate{}), Value(std::monostate{}),
                          Value(std::monostate{})});
    } else {
      for (const DeviationInterval& iv : report.deviation_intervals)
        rec.rows.push_back({Value(x0), Value(report.case_label), Value(iv.lo), Value(iv.hi),
                            Value(iv.lo_closed), Value(iv.hi_closed)});
    }
  }

  emit(rec, format, out);
  return 0;
}

int run_errors(const Params& p, const Grid& tau_grid, const std::vector<long>& ks,
               const std::string& format, const std::string& command, std::ostream& out,
               std::ostream& err) {
  std::vector<double> taus = grid_points(tau_grid);
  for (double t : taus)
    if (t < 0.0) {
      err << "errors: tau grid must be nonnegative\n";
      return 2;
    }

  double threshold =
      p.regime() == Regime::SOFT ? p.upper_landmark() : tau_bar(p).tau_bar;

  OutputRecord rec;
  rec.schema = "ERRORS";
  meta_common(rec, command, p);
  rec.meta.emplace_back("tau_grid", format_real(tau_grid.lo) + ":" + format_real(tau_grid.hi) +
                                        ":" + std::to_string(tau_grid.n));
  {
    std::string klist;
    for (size_t i = 0; i < ks.size(); ++i) klist += (i ? "," : "") + std::to_string(ks[i]);
    rec.meta.emplace_back("k", klist);
  }
  rec.meta.emplace_back("threshold", format_real(threshold));
  rec.columns = {"tau", "k", "x0", "x_k", "prox_point", "error", "lower", "upper"};

  long k_max = ks.back();
  for (double tau : taus) {
    double x0 = adaptive_init(tau, p);
    double prox_pt = predict_limit(x0, tau, p).value;
    bool bounds_ok = tau > threshold;
    double x = x0;
    size_t next = 0;
    for (long k = 1; k <= k_max && next < ks.size(); ++k) {
      x = irl1_step(x, tau, p);
      if (k != ks[next]) continue;
      ++next;
      std::vector<Value> row{Value(tau), Value(static_cast<long long>(k)), Value(x0),
                             Value(x),   Value(prox_pt),                   Value(x - prox_pt)};
      if (bounds_ok) {
        auto [lo, hi] = error_bounds(k, tau, p);
        row.emplace_back(lo);
        row.emplace_back(hi);
      } else {
        row.emplace_back(std::monostate{});
        row.emplace_back(std::monostate{});
      }
      rec.rows.push_back(std::move(row));
    }
  }

  emit(rec, format, out);
  return 0;
}

int run_taubar(const Params& p, bool with_oracle, const std::string& format,
               const std::string& command, std::ostream& out, std::ostream& err) {
  if (p.regime() == Regime::SOFT) {
    err << "taubar: lambda <= sigma^2 (SOFT regime): the prox is single-valued "
           "everywhere, so no tie threshold exists. tau_bar is defined only for "
           "lambda > sigma^2, where it satisfies sigma*(1 + log(lambda/sigma^2)) "
           "<= tau_bar <= lambda/sigma.\n";
    return 2;
  }
  Thresholds th = tau_bar(p);
  double resid = std::fabs(tie_equation(th.x_star, p));

  OutputRecord rec;
  rec.schema = "SWEEP";
  meta_common(rec, command, p);
  rec.columns = {"x_star", "tau_bar", "lower", "upper", "g_residual"};
  std::vector<Value> row{Value(th.x_star), Value(th.tau_bar), Value(th.lower),
                         Value(th.upper), Value(resid)};

  bool oracle_fail = false;
  if (with_oracle) {
    double bf = brute_force_tau_bar(p, 1e-12);
    double disc = std::fabs(bf - th.tau_bar);
    rec.columns.push_back("oracle_tau_bar");
    rec.columns.push_back("discrepancy");
    row.emplace_back(bf);
    row.emplace_back(disc);
    rec.meta.emplace_back("oracle_discrepancy", format_real(disc));
    if (disc > kOracleTauBarTol) oracle_fail = true;
  }
  rec.rows.push_back(std::move(row));

  emit(rec, format, out);
  if (oracle_fail) {
    err << "oracle cross-check failed: tau_bar disagrees with brute force beyond "
        << format_real(kOracleTauBarTol) << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"PiE proximal toolkit: exact prox of the piece-wise exponential "
               "penalty, IRL1 simulation, deviation regions, and error bounds"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string command = echo_command(argc, argv);

  double lambda = 0, sigma = 0, tau = 0, x0 = 0, tol = 1e-12;
  long max_iter = 10000;
  std::string format = "csv", init_mode, x0_grid_s, tau_grid_s, k_list_s;
  bool with_oracle = false;

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--lambda", lambda, "penalty weight lambda")
        ->required()
        ->check(CLI::PositiveNumber);
    sc->add_option("--sigma", sigma, "penalty shape sigma")
        ->required()
        ->check(CLI::PositiveNumber);
    sc->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };

  CLI::App* sc_prox = app.add_subcommand("prox", "evaluate the exact prox at tau");
  add_common(sc_prox);
  sc_prox->add_option("--tau", tau, "prox input")->required()->check(CLI::Number);
  sc_prox->add_flag("--oracle", with_oracle, "cross-check against the brute-force oracle");

  CLI::App* sc_irl1 = app.add_subcommand("irl1", "run the IRL1 iteration");
  add_common(sc_irl1);
  sc_irl1->add_option("--tau", tau, "prox input")->required()->check(CLI::PositiveNumber);
  CLI::Option* o_x0 =
      sc_irl1->add_option("--x0", x0, "initial value")->check(CLI::NonNegativeNumber);
  CLI::Option* o_init = sc_irl1->add_option("--init", init_mode, "initialization rule")
                            ->check(CLI::IsMember({"adaptive"}));
  o_x0->excludes(o_init);
  o_init->excludes(o_x0);
  sc_irl1->add_option("--tol", tol, "convergence tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sc_irl1->add_option("--max-iter", max_iter, "iteration cap")
      ->check(CLI::Range(1L, std::numeric_limits<long>::max()))
      ->capture_default_str();

  CLI::App* sc_region = app.add_subcommand("region", "deviation intervals per x0");
  add_common(sc_region);
  CLI::Option* o_rx0 =
      sc_region->add_option("--x0", x0, "initial value")->check(CLI::NonNegativeNumber);
  CLI::Option* o_rgrid = sc_region->add_option("--x0-grid", x0_grid_s, "x0 sweep lo:hi:n");
  o_rx0->excludes(o_rgrid);
  o_rgrid->excludes(o_rx0);

  CLI::App* sc_errors = app.add_subcommand("errors", "error curves over a tau grid");
  add_common(sc_errors);
  sc_errors->add_option("--tau-grid", tau_grid_s, "tau sweep lo:hi:n")->required();
  sc_errors->add_option("--k", k_list_s, "iteration counts, e.g. 1,2,3,4")->required();

  CLI::App* sc_taubar = app.add_subcommand("taubar", "tie threshold tau_bar");
  add_common(sc_taubar);
  sc_taubar->add_flag("--oracle", with_oracle, "cross-check against the brute-force oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    Params p(lambda, sigma);
    if (sc_prox->parsed())
      return run_prox(p, tau, with_oracle, format, command, out, err);
    if (sc_irl1->parsed()) {
      bool has_x0 = o_x0->count() > 0, adaptive = o_init->count() > 0;
      if (!has_x0 && !adaptive) {
        err << "irl1: provide --x0 or --init adaptive\n";
        return 2;
      }
      return run_irl1(p, tau, has_x0, x0, adaptive, tol, max_iter, format, command, out, err);
    }
    if (sc_region->parsed()) {
      std::vector<double> x0s;
      if (o_rgrid->count() > 0) {
        Grid g;
        std::string why;
        if (!parse_grid(x0_grid_s, g, why)) {
          err << "region: bad --x0-grid: " << why << "\n";
          return 2;
        }
        x0s = grid_points(g);
        for (double v : x0s)
          if (v < 0.0) {
            err << "region: x0 grid must be nonnegative\n";
            return 2;
          }
      } else if (o_rx0->count() > 0) {
        x0s.push_back(x0);
      } else {
        err << "region: provide --x0 or --x0-grid\n";
        return 2;
      }
      return run_region(p, x0s, format, command, out);
    }
    if (sc_errors->parsed()) {
      Grid g;
      std::vector<long> ks;
      std::string why;
      if (!parse_grid(tau_grid_s, g, why)) {
        err << "errors: bad --tau-grid: " << why << "\n";
        return 2;
      }
      if (!parse_k_list(k_list_s, ks, why)) {
        err << "errors: bad --k: " << why << "\n";
        return 2;
      }
      return run_errors(p, g, ks, format, command, out, err);
    }
    return run_taubar(p, with_oracle, format, command, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace pie
