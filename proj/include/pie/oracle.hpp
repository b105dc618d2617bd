#pragma once

#include <vector>

#include "pie/params.hpp"

namespace pie {

/// Inclusive sampling grid for the brute-force minimizer.
struct GridSpec {
  double lo;
  double hi;
  long n;             ///< number of samples, >= 1000
  int refine_rounds;  ///< local refinement rounds, >= 2

  GridSpec(double lo_, double hi_, long n_, int refine_rounds_);
};

/// Grid covering [-|tau|-1, |tau|+1] with the default resolution
/// (n = 200001, 4 refinement rounds each shrinking the window by 100x;
/// final resolution ~1e-13 * (|tau|+1)).
GridSpec default_grid(double tau, long n = 200001);

/// Ground-truth minimizer set of F(.; tau) by dense grid evaluation plus
/// local refinement: keeps all points within 1e-12 of the minimum, clusters
/// points closer than 1e-6, and returns 1 or 2 representatives (ascending).
/// No theory involved — this is the oracle the closed forms are tested against.
std::vector<double> brute_force_prox(double tau, const Params& p, const GridSpec& g);
std::vector<double> brute_force_prox(double tau, const Params& p);

/// Ground-truth tie threshold: bisection on h(tau) = F(x1(tau); tau) - F(0; tau)
/// over [lower, upper] until |h| <= tol (h is strictly decreasing).
/// Throws std::domain_error in the SOFT regime.
double brute_force_tau_bar(const Params& p, double tol = 1e-12);

}  // namespace pie
