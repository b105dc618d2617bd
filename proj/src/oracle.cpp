#include "pie/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pie/prox.hpp"

namespace pie {
namespace {

// Tie window: grid points whose objective is within this of the global
// minimum survive into the candidate set.
constexpr double kTieWindow = 1e-12;
// Neighbouring candidates with a gap below this merge into one cluster
// (single linkage).  The fp-flat bottom of one basin chains together with
// gaps of at most a few grid steps, while distinct minimizers of F are
// separated by the tie magnitude, many orders above this.
constexpr double kClusterDist = 1e-6;

struct Candidate {
  double x;
  double f;
};

// Evaluate F on an inclusive grid and append every local minimum that is
// within `window` of the best value seen on this grid.
void scan_grid(double lo, double hi, long n, double tau, const Params& p,
               double window, std::vector<Candidate>& out) {
  double h = n > 1 ? (hi - lo) / static_cast<double>(n - 1) : 0.0;
  std::vector<double> f(static_cast<size_t>(n));
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < n; ++i) {
    double x = lo + h * static_cast<double>(i);
    f[static_cast<size_t>(i)] = objective_F(x, tau, p);
    best = std::min(best, f[static_cast<size_t>(i)]);
  }
  for (long i = 0; i < n; ++i) {
    bool left_ok = i == 0 || f[static_cast<size_t>(i)] <= f[static_cast<size_t>(i - 1)];
    bool right_ok = i == n - 1 || f[static_cast<size_t>(i)] <= f[static_cast<size_t>(i + 1)];
    if (left_ok && right_ok && f[static_cast<size_t>(i)] <= best + window)
      out.push_back({lo + h * static_cast<double>(i), f[static_cast<size_t>(i)]});
  }
}

std::vector<Candidate> cluster(std::vector<Candidate> cands) {
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.x < b.x; });
  std::vector<Candidate> out;
  double last_x = 0.0;
  for (const Candidate& c : cands) {
    if (!out.empty() && c.x - last_x < kClusterDist) {
      if (c.f < out.back().f) out.back() = c;  // keep the best representative
    } else {
      out.push_back(c);
    }
    last_x = c.x;
  }
  return out;
}

}  // namespace

GridSpec::GridSpec(double lo_, double hi_, long n_, int refine_rounds_)
    : lo(lo_), hi(hi_), n(n_), refine_rounds(refine_rounds_) {
  if (!(lo < hi)) throw std::invalid_argument("GridSpec: lo must be < hi");
  if (n < 1000) throw std::invalid_argument("GridSpec: n must be >= 1000");
  if (refine_rounds < 2) throw std::invalid_argument("GridSpec: refine_rounds must be >= 2");
}

GridSpec default_grid(double tau, long n) {
  double r = std::fabs(tau) + 1.0;
  return GridSpec(-r, r, n, 4);
}

std::vector<double> brute_force_prox(double tau, const Params& p, const GridSpec& g) {
  // Pass 0: coarse scan with a generous window so a tying minimizer a few
  // grid-quantization errors above the sampled minimum is not lost.
  double h0 = (g.hi - g.lo) / static_cast<double>(g.n - 1);
  double curvature = 1.0 + p.lambda / (p.sigma * p.sigma);
  double coarse_window = std::fmax(1e-9, 4.0 * curvature * h0 * h0);

  std::vector<Candidate> cands;
  scan_grid(g.lo, g.hi, g.n, tau, p, coarse_window, cands);
  cands = cluster(cands);

  double window = g.hi - g.lo;
  for (int round = 0; round < g.refine_rounds; ++round) {
    window /= 100.0;
    double hw = 0.5 * window;
    double h = window / static_cast<double>(g.n - 1);
    double fine_window = round + 1 < g.refine_rounds
                             ? std::fmax(kTieWindow, 4.0 * curvature * h * h)
                             : kTieWindow;
    std::vector<Candidate> next;
    for (const Candidate& c : cands)
      scan_grid(c.x - hw, c.x + hw, g.n, tau, p, fine_window, next);
    // Windows around distinct candidates never interact: keep only points
    // within the window of the global best across all refined scans.
    double best = std::numeric_limits<double>::infinity();
    for (const Candidate& c : next) best = std::min(best, c.f);
    std::vector<Candidate> kept;
    for (const Candidate& c : next)
      if (c.f <= best + fine_window) kept.push_back(c);
    cands = cluster(std::move(kept));
  }

  std::vector<double> out;
  out.reserve(cands.size());
  for (const Candidate& c : cands) out.push_back(c.x);
  return out;
}

std::vector<double> brute_force_prox(double tau, const Params& p) {
  return brute_force_prox(tau, p, default_grid(tau));
}

double brute_force_tau_bar(const Params& p, double tol) {
  if (p.regime() != Regime::HARD)
    throw std::domain_error("brute_force_tau_bar: requires lambda > sigma^2");
  auto h = [&](double tau) {
    return objective_F(x1(tau, p), tau, p) - objective_F(0.0, tau, p);
  };
  // h is strictly decreasing (h'(tau) = -x1(tau) < 0): h > 0 below the tie,
  // h < 0 above it.
  double lo = p.lower_landmark(), hi = p.upper_landmark();
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    double hm = h(mid);
    if (std::fabs(hm) <= tol || hi - lo <= 4e-16 * std::fmax(1.0, hi)) break;
    (hm > 0.0 ? lo : hi) = mid;
  }
  return mid;
}

}  // namespace pie
