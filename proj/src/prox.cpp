#include "pie/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pie/lambert_w.hpp"

namespace pie {
namespace {

// psi(u) = ((1 + u)*exp(-u) - 1)/u^2, the 0/0-prone core of the tie equation.
// Series for small u (coefficients (-1)^{m+1}*(m+1)/(m+2)!), expm1 form
// otherwise; psi(0+) = -1/2, and psi is increasing towards 0- as u -> inf.
double psi(double u) {
  if (u < 1e-2) {
    double sum = -0.5, pow_u = 1.0, fact = 2.0;  // fact = (m + 2)! running
    for (int m = 1; m <= 30; ++m) {
      pow_u *= -u;
      fact *= m + 2;
      double term = -pow_u * (m + 1) / fact;  // (-1)^{m+1} (m+1)/(m+2)! u^m
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
  }
  return (std::expm1(-u) + u * std::exp(-u)) / (u * u);
}

// g(x) = 1/2 + lambda * psi(x/sigma) / sigma^2; strictly increasing on (0, inf)
// with g(0+) = (1 - lambda/sigma^2)/2 < 0 in the HARD regime and
// g(sqrt(2*lambda)) > 0, so bisection always sees a sign change.
double g_of(double x, const Params& p) {
  double u = x / p.sigma;
  return 0.5 + p.lambda * psi(u) / (p.sigma * p.sigma);
}

// g'(x) = -lambda * (exp(-u) + 2*psi(u)) / (sigma^2 * x); the bracketed term
// is negative for all u > 0, so g' > 0.
double g_prime(double x, const Params& p) {
  double u = x / p.sigma;
  return -p.lambda * (std::exp(-u) + 2.0 * psi(u)) / (p.sigma * p.sigma * x);
}

void require_hard(const Params& p, const char* who) {
  if (p.regime() != Regime::HARD)
    throw std::domain_error(std::string(who) +
                            ": requires the HARD regime (lambda > sigma^2)");
}

}  // namespace

double objective_F(double x, double tau, const Params& p) {
  double penalty = -std::expm1(-std::fabs(x) / p.sigma);  // 1 - e^{-|x|/sigma}
  double d = x - tau;
  return p.lambda * penalty + 0.5 * d * d;
}

double tie_equation(double x, const Params& p) { return g_of(x, p); }

double phi(double x, double tau, const Params& p) {
  return tau - x - (p.lambda / p.sigma) * std::exp(-x / p.sigma);
}

double x1(double tau, const Params& p) {
  double t = std::fabs(tau);
  double arg = -p.ratio() * std::exp(-t / p.sigma);
  return p.sigma * lambert_w0(arg).w + t;  // lambert_w0 enforces arg >= -1/e
}

double x2(double tau, const Params& p) {
  double arg = -p.ratio() * std::exp(-tau / p.sigma);
  double v = p.sigma * lambert_wm1(arg).w + tau;
  // At tau = upper the exact root is 0; snap away the rounding dust so the
  // 0 <= x2 <= M invariant holds on [lower, upper].
  if (v < 0.0 && v > -1e-9 * std::fmax(1.0, p.sigma)) v = 0.0;
  return v;
}

double x2_inverse(double x0, const Params& p) {
  require_hard(p, "x2_inverse");
  double m = p.mid_landmark();
  if (!(x0 >= 0.0 && x0 <= m * (1.0 + 1e-12)))
    throw std::domain_error("x2_inverse: x0 must lie in [0, sigma*log(lambda/sigma^2)]");
  return x0 + (p.lambda / p.sigma) * std::exp(-x0 / p.sigma);
}

Thresholds tau_bar(const Params& p) {
  require_hard(p, "tau_bar");
  double span = std::sqrt(2.0 * p.lambda);
  double lo = 1e-12 * span, hi = span;
  if (!(g_of(lo, p) < 0.0 && g_of(hi, p) > 0.0))
    throw std::runtime_error("tau_bar: bisection bracket lost its sign change");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * span; ++it) {
    double mid = 0.5 * (lo + hi);
    (g_of(mid, p) < 0.0 ? lo : hi) = mid;
  }
  double xs = 0.5 * (lo + hi);
  // Newton polish so |g(x_star)| <= 1e-12 holds for large lambda too.
  for (int it = 0; it < 5 && std::fabs(g_of(xs, p)) > 1e-13; ++it) {
    double step = g_of(xs, p) / g_prime(xs, p);
    double next = xs - step;
    if (next > lo && next < hi) xs = next; else break;
  }
  Thresholds th;
  th.x_star = xs;
  th.tau_bar = xs + (p.lambda / p.sigma) * std::exp(-xs / p.sigma);
  th.lower = p.lower_landmark();
  th.upper = p.upper_landmark();
  return th;
}

ProxResult prox(double tau, const Params& p) {
  ProxResult r;
  r.regime = p.regime();
  r.at_tie = false;
  double t = std::fabs(tau);
  double sign = tau < 0.0 ? -1.0 : 1.0;

  if (r.regime == Regime::SOFT) {
    if (t <= p.upper_landmark()) {
      r.points = {0.0};
    } else {
      r.points = {sign * x1(t, p)};
    }
    return r;
  }

  Thresholds th = tau_bar(p);
  double tie_band = kTieTol * std::fmax(1.0, th.tau_bar);
  if (std::fabs(t - th.tau_bar) <= tie_band) {
    r.at_tie = true;
    // Inside the band the nonzero minimizer is x1(t); in near-degenerate
    // params (lambda barely above sigma^2) the low edge of the band can dip
    // a hair below the x1 domain, where x_star is the right representative.
    double xv;
    try {
      xv = x1(t, p);
    } catch (const std::domain_error&) {
      xv = th.x_star;
    }
    r.points = {0.0, sign * xv};
    std::sort(r.points.begin(), r.points.end());
  } else if (t < th.tau_bar) {
    r.points = {0.0};
  } else {
    r.points = {sign * x1(t, p)};
  }
  return r;
}

std::vector<double> prox_elementwise(const std::vector<double>& taus, const Params& p) {
  std::vector<double> out;
  out.reserve(taus.size());
  for (double t : taus) {
    ProxResult r = prox(t, p);
    // Ties resolve to the smaller-magnitude point (always 0).
    double v = r.points.size() == 1 ? r.points[0] : 0.0;
    out.push_back(v);
  }
  return out;
}

}  // namespace pie
