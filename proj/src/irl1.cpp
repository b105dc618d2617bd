#include "pie/irl1.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pie {
namespace {

constexpr long kDensePrefix = 1000;  // iterates stored densely
constexpr long kSparseEvery = 100;   // afterwards every 100th, plus the last two

// Distance from the prox set deciding LimitPrediction::in_prox_set.
constexpr double kMembershipTol = 1e-8;

bool in_prox_set(double value, double tau, const Params& p) {
  for (double q : prox(tau, p).points)
    if (std::fabs(value - q) <= kMembershipTol) return true;
  return false;
}

// Shared precondition of error_bounds/qlinear_rate/error_sequence: the run
// starts at x0 = tau strictly above the regime threshold.
double require_bounds_region(double tau, const Params& p) {
  double threshold = p.regime() == Regime::SOFT ? p.upper_landmark() : tau_bar(p).tau_bar;
  if (!(tau > threshold))
    throw std::domain_error(
        "error bounds require tau > " +
        std::string(p.regime() == Regime::SOFT ? "lambda/sigma" : "tau_bar"));
  return x1(tau, p);
}

}  // namespace

double irl1_step(double x, double tau, const Params& p) {
  double v = tau - (p.lambda / p.sigma) * std::exp(-x / p.sigma);
  return v > 0.0 ? v : 0.0;
}

Trajectory irl1_run(double x0, double tau, const Params& p, double tol, long max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("irl1_run: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("irl1_run: max_iter must be >= 1");

  Trajectory t;
  t.converged = false;
  t.iterations = 0;

  double x = x0;
  auto store = [&](long k, double v) {
    if (!t.iterates.empty() && t.iterates.back().k == k) return;
    t.iterates.push_back({k, v});
  };

  if (x == 0.0) t.hit_zero_at = 0;
  store(0, x);

  double x_prev_tail = x;  // second-to-last iterate, for the tail guarantee
  long k = 0;
  for (; k < max_iter; ++k) {
    double next = irl1_step(x, tau, p);
    if (next == 0.0 && !t.hit_zero_at) t.hit_zero_at = k + 1;
    bool done = std::fabs(next - x) <= tol;
    x_prev_tail = x;
    x = next;
    if (k + 1 < kDensePrefix || (k + 1) % kSparseEvery == 0 || done || k + 1 == max_iter)
      store(k + 1, x);
    if (done) {
      t.converged = true;
      ++k;
      break;
    }
  }
  t.iterations = k;
  t.limit = x;

  // Guarantee the last two iterates are present (the loop stores the last;
  // backfill its predecessor when the sparse rule skipped it).
  if (t.iterations >= 1) {
    long last = t.iterates.back().k;
    bool have_prev = t.iterates.size() >= 2 && t.iterates[t.iterates.size() - 2].k == last - 1;
    if (!have_prev && last >= 1) {
      IterSample tail = t.iterates.back();
      t.iterates.back() = {last - 1, x_prev_tail};
      t.iterates.push_back(tail);
    }
  }
  return t;
}

LimitPrediction predict_limit(double x0, double tau, const Params& p) {
  LimitPrediction out;
  auto finish = [&](double v, LimitKind kind) {
    out.value = v;
    out.kind = kind;
    out.in_prox_set = in_prox_set(v, tau, p);
    return out;
  };

  if (p.regime() == Regime::SOFT) {
    if (tau <= p.upper_landmark()) return finish(0.0, LimitKind::ZERO);
    return finish(x1(tau, p), LimitKind::X1);
  }
  double lower = p.lower_landmark(), upper = p.upper_landmark();
  if (tau < lower) return finish(0.0, LimitKind::ZERO);
  if (tau > upper) return finish(x1(tau, p), LimitKind::X1);
  double knife = x2(tau, p);
  if (std::fabs(x0 - knife) <= kKnifeEdgeTol) return finish(knife, LimitKind::X2);
  if (x0 > knife) return finish(x1(tau, p), LimitKind::X1);
  return finish(0.0, LimitKind::ZERO);
}

RegionReport deviation_region(double x0, const Params& p) {
  RegionReport r{p, x0, {}, "none"};
  if (p.regime() == Regime::SOFT) return r;

  Thresholds th = tau_bar(p);
  double m = p.mid_landmark();
  double knife = x2(th.tau_bar, p);
  if (std::fabs(x0 - knife) <= kKnifeEdgeTol) {
    r.case_label = "iv";
    r.deviation_intervals.push_back({th.tau_bar, th.tau_bar, true, true});
  } else if (x0 >= m) {
    r.case_label = "ii";
    r.deviation_intervals.push_back({th.lower, th.tau_bar, true, false});
  } else if (x0 > knife) {
    r.case_label = "iii";
    r.deviation_intervals.push_back({x2_inverse(x0, p), th.tau_bar, true, false});
  } else {
    r.case_label = "v";
    r.deviation_intervals.push_back({th.tau_bar, x2_inverse(x0, p), false, true});
  }
  return r;
}

double adaptive_init(double tau, const Params& p) {
  double threshold = p.regime() == Regime::SOFT ? p.upper_landmark() : tau_bar(p).tau_bar;
  return tau <= threshold ? 0.0 : tau;
}

std::pair<double, double> error_bounds(long k, double tau, const Params& p) {
  if (k < 1) throw std::invalid_argument("error_bounds: k must be >= 1");
  double x1v = require_bounds_region(tau, p);
  double gap = tau - x1v;
  double lo_base = p.ratio() * std::exp(-tau / p.sigma);
  double hi_base = p.ratio() * std::exp(-x1v / p.sigma);
  return {std::pow(lo_base, static_cast<double>(k)) * gap,
          std::pow(hi_base, static_cast<double>(k)) * gap};
}

double qlinear_rate(double tau, const Params& p) {
  double x1v = require_bounds_region(tau, p);
  return p.ratio() * std::exp(-x1v / p.sigma);
}

std::vector<double> error_sequence(long k_max, double tau, const Params& p) {
  if (k_max < 0) throw std::invalid_argument("error_sequence: k_max must be >= 0");
  double x1v = require_bounds_region(tau, p);
  double c = (p.lambda / p.sigma) * std::exp(-x1v / p.sigma);
  std::vector<double> d;
  d.reserve(static_cast<size_t>(k_max) + 1);
  d.push_back(tau - x1v);
  for (long k = 0; k < k_max; ++k)
    d.push_back(-c * std::expm1(-d.back() / p.sigma));
  return d;
}

}  // namespace pie
