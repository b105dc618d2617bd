#include "pie/lambert_w.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pie {
namespace {

constexpr int kMaxIter = 50;
// Distance below -1/e tolerated and clamped to the branch point; downstream
// expressions like -(lambda/sigma^2)*exp(-tau/sigma) hit -1/e exactly in
// theory but not in floating point.
constexpr double kClampTol = 1e-15;
// Within this distance above -1/e the square-root series is returned directly;
// Halley's denominator vanishes at w = -1.
constexpr double kSeriesWindow = 1e-10;

const double kInvE = std::exp(-1.0);

double residual_of(double w, double x) { return std::fabs(w * std::exp(w) - x); }

double residual_tol(double x) { return 1e-12 * std::fmax(1.0, std::fabs(x)); }

// Branch-point expansion w = -1 + s*p - p^2/3 + s*11*p^3/72, p = sqrt(2*(e*x + 1)),
// with s = +1 on W0 and s = -1 on W-1. Truncation error is O(p^4).
double branch_point_series(double x, double sign) {
  double q = 2.0 * (std::exp(1.0) * x + 1.0);
  double p = std::sqrt(std::fmax(q, 0.0));
  return -1.0 + sign * p - p * p / 3.0 + sign * (11.0 / 72.0) * p * p * p;
}

// Validate/clamp x against the branch point; returns true when the caller
// should return the branch-point value w = -1 immediately.
bool clamp_to_branch_point(double& x, const char* who) {
  if (std::isnan(x)) throw std::domain_error(std::string(who) + ": x is NaN");
  if (x < -kInvE) {
    if (x < -kInvE - kClampTol)
      throw std::domain_error(std::string(who) + ": x below -1/e");
    x = -kInvE;
    return true;
  }
  return false;
}

}  // namespace

BranchValue lambert_w0(double x) {
  if (clamp_to_branch_point(x, "lambert_w0")) return {-1.0, residual_of(-1.0, x), 0};
  if (x + kInvE < kSeriesWindow) {
    double w = branch_point_series(x, +1.0);
    return {w, residual_of(w, x), 0};
  }

  // Bracket [a, b] with f(a) <= 0 <= f(b) for f(w) = w*exp(w) - x. On this
  // branch w*exp(w) is increasing; W0(x) <= log1p(x) for x >= 0.
  double a, b, w;
  if (x < 0.0) {
    a = -1.0;
    b = 0.0;
    w = x > -0.3 ? x * (1.0 - x) : branch_point_series(x, +1.0);
  } else {
    a = 0.0;
    b = std::log1p(x);
    if (x > 3.0) {
      // Log asymptote W0(x) ~ L1 - L2 + L2/L1, L1 = log x, L2 = log log x.
      double l1 = std::log(x), l2 = std::log(l1);
      w = l1 - l2 + l2 / l1;
    } else {
      w = x < 1.0 ? x * (1.0 - x) : 0.7 * b;
    }
  }
  if (!(w > a && w < b)) w = 0.5 * (a + b);

  double tol = residual_tol(x);
  int it = 0;
  double f = w * std::exp(w) - x;
  for (; it < kMaxIter && std::fabs(f) > tol; ++it) {
    // Halley step for f(w) = w*e^w - x.
    double ew = std::exp(w);
    double f1 = ew * (w + 1.0);
    double step = f / (f1 - f * (w + 2.0) / (2.0 * (w + 1.0)));
    double w_next = w - step;
    if (!std::isfinite(w_next) || w_next <= a || w_next >= b)
      w_next = 0.5 * (a + b);  // bisect when Halley leaves the bracket
    double f_next = w_next * std::exp(w_next) - x;
    if (f_next <= 0.0) a = w_next; else b = w_next;
    w = w_next;
    f = f_next;
  }
  if (w < -1.0) w = -1.0;
  double res = residual_of(w, x);
  if (res > residual_tol(x))
    throw std::runtime_error("lambert_w0: residual tolerance not reached");
  return {w, res, it};
}

BranchValue lambert_wm1(double x) {
  if (x >= 0.0) throw std::domain_error("lambert_wm1: x must be negative");
  if (clamp_to_branch_point(x, "lambert_wm1")) return {-1.0, residual_of(-1.0, x), 0};
  if (x + kInvE < kSeriesWindow) {
    double w = branch_point_series(x, -1.0);
    return {w, residual_of(w, x), 0};
  }

  // Solve in the log form: with u = -w >= 1, w*e^w = x becomes
  // q(u) = log(u) - u - log(-x) = 0, strictly decreasing on (1, inf).
  // This stays well-conditioned down to x = -1e-300 where e^w denormalizes.
  double lnx = std::log(-x);  // in [-inf, -1)
  double u_lo = 1.0;          // q(u_lo) = -1 - lnx >= 0
  double u_hi = std::fmax(2.0, -lnx + 2.0 * std::log(std::fmax(2.0, -lnx)));
  while (std::log(u_hi) - u_hi - lnx > 0.0) u_hi *= 2.0;

  // Asymptotic guess u ~ -L1 + L2 - L2/L1 with L1 = log(-x), L2 = log(-L1).
  double l1 = lnx, l2 = std::log(-l1);
  double u = -l1 + l2 - l2 / l1;
  if (!(u > u_lo && u < u_hi)) u = 0.5 * (u_lo + u_hi);

  int it = 0;
  double q = std::log(u) - u - lnx;
  // Newton on q (q' = 1/u - 1), safeguarded by the bracket.
  for (; it < kMaxIter && std::fabs(q) > 1e-15 * std::fmax(1.0, std::fabs(lnx)); ++it) {
    double u_next = u - q * u / (1.0 - u);
    if (!std::isfinite(u_next) || u_next <= u_lo || u_next >= u_hi)
      u_next = 0.5 * (u_lo + u_hi);
    double q_next = std::log(u_next) - u_next - lnx;
    if (q_next >= 0.0) u_lo = u_next; else u_hi = u_next;
    u = u_next;
    q = q_next;
  }
  double w = -u;
  if (w > -1.0) w = -1.0;
  double res = residual_of(w, x);
  if (res > residual_tol(x))
    throw std::runtime_error("lambert_wm1: residual tolerance not reached");
  return {w, res, it};
}

}  // namespace pie
