#pragma once

namespace pie {

/// Result of a Lambert W branch evaluation.
struct BranchValue {
  double w;         ///< branch value
  double residual;  ///< |w * exp(w) - x|, absolute
  int iterations;   ///< solver iterations actually used
};

/// Principal branch W0 of the Lambert W function (w >= -1), the inverse of
/// w -> w*exp(w) on [-1, inf).
///
/// Domain: x >= -1/e. Inputs within 1e-15 below -1/e are clamped to the
/// branch point (returns w = -1); anything lower throws std::domain_error.
/// Accepted output satisfies |w*exp(w) - x| <= 1e-12 * max(1, |x|).
BranchValue lambert_w0(double x);

/// Secondary real branch W-1 of the Lambert W function (w <= -1), defined on
/// [-1/e, 0). Same clamp policy at the branch point; x >= 0 or
/// x < -1/e - 1e-15 throws std::domain_error.
BranchValue lambert_wm1(double x);

}  // namespace pie
