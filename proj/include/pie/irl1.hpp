#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pie/params.hpp"
#include "pie/prox.hpp"

namespace pie {

/// One stored iterate of an IRL1 run. Storage is capped: the first 1000
/// iterates are kept densely, afterwards only every 100th plus the last two,
/// so k is carried explicitly.
struct IterSample {
  long k;
  double x;
};

/// Outcome of an IRL1 run.
struct Trajectory {
  std::vector<IterSample> iterates;  ///< capped record, ascending k, starts at k = 0
  double limit;                      ///< last iterate
  bool converged;                    ///< |x_{k+1} - x_k| <= tol reached before max_iter
  long iterations;                   ///< number of update steps performed
  std::optional<long> hit_zero_at;   ///< first k with x^(k) == 0, if any
};

enum class LimitKind { ZERO, X1, X2 };

/// Closed-form prediction of the IRL1 limit.
struct LimitPrediction {
  double value;
  LimitKind kind;
  bool in_prox_set;  ///< value lies within 1e-8 of the prox set of tau
};

/// Half-open/closed tau-interval where IRL1 from a given x0 misses the prox set.
struct DeviationInterval {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;
};

/// Deviation intervals for fixed (params, x0), with the classification label:
/// "ii" x0 >= M, "iii" x2(tau_bar) < x0 < M, "iv" x0 = x2(tau_bar) (a single
/// point), "v" 0 <= x0 < x2(tau_bar); empty (label "none") in the SOFT regime.
struct RegionReport {
  Params params;
  double x0;
  std::vector<DeviationInterval> deviation_intervals;
  std::string case_label;
};

/// Absolute tolerance under which x0 counts as sitting exactly on the
/// knife-edge fixed point x2(tau). The theory says the sequence then stays at
/// x2 forever, but the fixed point is numerically repelling: floating-point
/// drift pushes a simulated run into a neighboring basin.
inline constexpr double kKnifeEdgeTol = 1e-12;

/// One IRL1 update: (tau - (lambda/sigma)*exp(-x/sigma))_+ .
/// Requires x >= 0 and tau > 0 (not validated here; the CLI validates).
double irl1_step(double x, double tau, const Params& p);

/// Run the IRL1 iteration from x0 until |x_{k+1} - x_k| <= tol or max_iter
/// steps. Non-convergence is reported via the flag, never thrown.
Trajectory irl1_run(double x0, double tau, const Params& p, double tol = 1e-12,
                    long max_iter = 10000);

/// Closed-form limit of the iteration without running it.
/// SOFT: 0 if tau <= U else x1(tau). HARD: 0 if tau < L; x1(tau) if tau > U;
/// on [L, U]: x1(tau) if x0 > x2(tau), x2(tau) on the knife edge, else 0.
LimitPrediction predict_limit(double x0, double tau, const Params& p);

/// tau-intervals on which the IRL1 limit from x0 is not a prox point.
RegionReport deviation_region(double x0, const Params& p);

/// Initializer that provably removes the deviation: 0 when tau is at or below
/// the regime threshold (U in SOFT, tau_bar in HARD), tau otherwise.
double adaptive_init(double tau, const Params& p);

/// Geometric sandwich bounds on x^(k) - x1(tau) for the run started at
/// x0 = tau (valid for tau > U in SOFT, tau > tau_bar in HARD; throws
/// std::domain_error otherwise):
///   lower = (lambda/sigma^2 * exp(-tau/sigma))^k * (tau - x1(tau))
///   upper = (lambda/sigma^2 * exp(-x1(tau)/sigma))^k * (tau - x1(tau))
std::pair<double, double> error_bounds(long k, double tau, const Params& p);

/// Asymptotic Q-linear rate (lambda/sigma^2)*exp(-x1(tau)/sigma) in (0, 1);
/// same precondition as error_bounds.
double qlinear_rate(double tau, const Params& p);

/// Exact error recurrence d_{k+1} = -(lambda/sigma)*exp(-x1/sigma)*expm1(-d_k/sigma)
/// for d_k = x^(k) - x1(tau) with x0 = tau. Mathematically identical to
/// iterating irl1_step, but keeps full relative precision when d_k shrinks
/// below one ulp of x1 (direct iterate subtraction saturates there).
/// Returns d_0..d_k_max. Same precondition as error_bounds.
std::vector<double> error_sequence(long k_max, double tau, const Params& p);

}  // namespace pie
