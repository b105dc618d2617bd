#pragma once

#include <vector>

#include "pie/params.hpp"

namespace pie {

/// Minimizer set of F(x; tau) = lambda*(1 - exp(-|x|/sigma)) + (x-tau)^2/2.
struct ProxResult {
  std::vector<double> points;  ///< 1 or 2 minimizers, ascending
  Regime regime;
  bool at_tie;  ///< true iff |tau| = tau_bar within the tie tolerance (HARD only)
};

/// Landmark values of the HARD regime. x_star is the root of
/// g(x) = 1/2 + lambda*((x/sigma + 1)*exp(-x/sigma) - 1)/x^2 on (0, sqrt(2*lambda))
/// and tau_bar = x_star + (lambda/sigma)*exp(-x_star/sigma) is the input at
/// which the prox objective ties between 0 and the nonzero stationary point.
struct Thresholds {
  double lower;    ///< sigma*(1 + log(lambda/sigma^2))
  double tau_bar;  ///< tie threshold, in [lower, upper]
  double upper;    ///< lambda/sigma
  double x_star;   ///< nonzero prox point at tau_bar; equals x1(tau_bar)
};

/// Relative tolerance deciding when |tau| counts as exactly tau_bar, making
/// the prox two-valued. Exact equality is measure-zero in floating point;
/// callers need a deterministic tie rule.
inline constexpr double kTieTol = 1e-9;

/// The prox objective F(x; tau) = lambda*(1 - exp(-|x|/sigma)) + (x-tau)^2/2.
double objective_F(double x, double tau, const Params& p);

/// The tie equation g(x) = 1/2 + lambda*((x/sigma + 1)*exp(-x/sigma) - 1)/x^2
/// whose unique root on (0, sqrt(2*lambda)) defines tau_bar. Evaluated by
/// series near 0 where the closed form is 0/0.
double tie_equation(double x, const Params& p);

/// phi(x) = tau - x - (lambda/sigma)*exp(-x/sigma); its roots x2 <= x1 are the
/// positive fixed points of the IRL1 map.
double phi(double x, double tau, const Params& p);

/// Larger root of phi(.; |tau|) = 0:
/// x1(tau) = sigma*W0(-(lambda/sigma^2)*exp(-|tau|/sigma)) + |tau|.
/// Throws std::domain_error when the W0 argument falls below -1/e
/// (no real stationary point).
double x1(double tau, const Params& p);

/// Smaller root of phi(.; tau) = 0 for tau >= 0:
/// x2(tau) = sigma*W_{-1}(-(lambda/sigma^2)*exp(-tau/sigma)) + tau.
/// Meaningful for tau in [lower, upper] in the HARD regime, where
/// 0 <= x2(tau) <= sigma*log(lambda/sigma^2). Throws std::domain_error
/// outside the W-1 domain.
double x2(double tau, const Params& p);

/// Inverse of x2 on [0, sigma*log(lambda/sigma^2)] (HARD regime):
/// x2_inverse(x0) = x0 + (lambda/sigma)*exp(-x0/sigma), strictly decreasing.
/// Throws std::domain_error outside that domain or in the SOFT regime.
double x2_inverse(double x0, const Params& p);

/// Solve for the tie threshold (HARD regime only; throws std::domain_error
/// when lambda <= sigma^2). Bisection of g on (eps, sqrt(2*lambda)) followed
/// by a short Newton polish; |g(x_star)| <= 1e-12 on return.
Thresholds tau_bar(const Params& p);

/// Exact prox of the PiE penalty.
/// SOFT: {0} if |tau| <= lambda/sigma, else {sign(tau)*x1(|tau|)}.
/// HARD: {0} below tau_bar, {sign(tau)*x1(|tau|)} above, and both points
/// (at_tie = true) when |tau| is within kTieTol (relative) of tau_bar.
/// Satisfies prox(-tau) = -prox(tau) pointwise.
ProxResult prox(double tau, const Params& p);

/// Convenience elementwise map (no solver): applies prox to each entry and
/// resolves the measure-zero tie case to the smaller-magnitude point (0).
std::vector<double> prox_elementwise(const std::vector<double>& taus, const Params& p);

}  // namespace pie
