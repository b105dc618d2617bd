#pragma once

#include <cmath>
#include <stdexcept>

namespace pie {

/// Regime split for the PiE prox problem: SOFT when lambda <= sigma^2
/// (the prox is single-valued and continuous in tau), HARD when
/// lambda > sigma^2 (the prox jumps at the tie threshold tau_bar).
enum class Regime { SOFT, HARD };

/// Validated parameter pair (lambda, sigma) for the penalty
/// lambda * f_sigma(x) with f_sigma(x) = 1 - exp(-|x|/sigma).
struct Params {
  double lambda;
  double sigma;

  Params(double lambda_, double sigma_) : lambda(lambda_), sigma(sigma_) {
    if (!(std::isfinite(lambda) && lambda > 0.0))
      throw std::invalid_argument("Params: lambda must be finite and > 0");
    if (!(std::isfinite(sigma) && sigma > 0.0))
      throw std::invalid_argument("Params: sigma must be finite and > 0");
  }

  Regime regime() const { return lambda <= sigma * sigma ? Regime::SOFT : Regime::HARD; }

  /// lambda / sigma^2, the weight ratio deciding the regime.
  double ratio() const { return lambda / (sigma * sigma); }

  /// Lower landmark L = sigma * (1 + log(lambda/sigma^2)).
  double lower_landmark() const { return sigma * (1.0 + std::log(ratio())); }

  /// Middle landmark M = sigma * log(lambda/sigma^2); equals x1 at tau = L.
  double mid_landmark() const { return sigma * std::log(ratio()); }

  /// Upper landmark U = lambda / sigma; the soft threshold.
  double upper_landmark() const { return lambda / sigma; }
};

}  // namespace pie
