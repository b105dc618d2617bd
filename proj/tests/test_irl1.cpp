#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "pie/irl1.hpp"
#include "pie/prox.hpp"

using pie::DeviationInterval;
using pie::LimitKind;
using pie::LimitPrediction;
using pie::Params;
using pie::RegionReport;
using pie::Thresholds;
using pie::Trajectory;

namespace {
// Distance from a value to the prox set of tau.
double prox_dist(double v, double tau, const Params& p) {
  pie::ProxResult r = pie::prox(tau, p);
  double d = std::fabs(v - r.points[0]);
  for (double pt : r.points) d = std::fmin(d, std::fabs(v - pt));
  return d;
}
}  // namespace

TEST_CASE("irl1_step basics") {
  Params soft(1.0, 2.0);
  CHECK(pie::irl1_step(0.0, 0.4, soft) == 0.0);  // 0.4 - 0.5 < 0 -> clipped
  CHECK(pie::irl1_step(0.0, 0.5, soft) == 0.0);
  Params hard(2.0, 1.0);
  CHECK(pie::irl1_step(0.0, 3.0, hard) == doctest::Approx(1.0).epsilon(1e-15));

  // x1 and x2 are fixed points of the map.
  for (double tau : {1.70, 1.7638, 1.9}) {
    double v1 = pie::x1(tau, hard);
    double v2 = pie::x2(tau, hard);
    CHECK(std::fabs(pie::irl1_step(v1, tau, hard) - v1) <= 1e-13);
    CHECK(std::fabs(pie::irl1_step(v2, tau, hard) - v2) <= 1e-13);
  }
}

TEST_CASE("irl1_run validation and trivial runs") {
  Params soft(1.0, 2.0);
  CHECK_THROWS_AS(pie::irl1_run(0.0, 1.0, soft, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pie::irl1_run(0.0, 1.0, soft, -1e-9), std::invalid_argument);
  CHECK_THROWS_AS(pie::irl1_run(0.0, 1.0, soft, 1e-12, 0), std::invalid_argument);

  // Absorbing zero: tau <= U keeps every iterate at 0.
  Trajectory t = pie::irl1_run(0.0, 0.4, soft);
  CHECK(t.converged);
  CHECK(t.limit == 0.0);
  REQUIRE(t.hit_zero_at.has_value());
  CHECK(*t.hit_zero_at == 0);
  for (const auto& s : t.iterates) CHECK(s.x == 0.0);
}

TEST_CASE("trajectory invariants") {
  Params hard(2.0, 1.0);
  Trajectory t = pie::irl1_run(1.0, 1.70, hard, 1e-12, 10000);
  CHECK(t.converged);
  REQUIRE(t.iterates.size() >= 2);
  CHECK(t.iterates.front().k == 0);
  CHECK(t.iterates.front().x == 1.0);
  CHECK(t.iterates.back().k == t.iterations);
  CHECK(t.iterates.back().x == t.limit);

  // Stored ks strictly ascend; dense consecutive pairs reproduce the map exactly.
  for (size_t i = 1; i < t.iterates.size(); ++i) {
    CHECK(t.iterates[i].k > t.iterates[i - 1].k);
    if (t.iterates[i].k == t.iterates[i - 1].k + 1) {
      CHECK(t.iterates[i].x == pie::irl1_step(t.iterates[i - 1].x, 1.70, hard));
    }
  }

  // The run converged onto the larger fixed point x1(1.70), which is NOT a
  // prox point of tau = 1.70 < tau_bar (that is the deviation phenomenon).
  CHECK(std::fabs(t.limit - 0.81254780947871489) <= 1e-9);
  CHECK(prox_dist(t.limit, 1.70, hard) > 0.5);

  // From x0 = 0 the same tau stays at the true prox point 0.
  Trajectory z = pie::irl1_run(0.0, 1.70, hard);
  CHECK(z.limit == 0.0);
  CHECK(prox_dist(z.limit, 1.70, hard) == 0.0);
}

TEST_CASE("storage cap keeps dense prefix, sparse tail, and last two") {
  Params hard(2.0, 1.0);
  // tau = L makes x = M a tangency of the update map, so the passage is
  // polynomially slow: steps at k = 2500 are still ~1e-7, far above tol.
  Trajectory t = pie::irl1_run(1.0, hard.lower_landmark(), hard, 1e-15, 2500);
  CHECK_FALSE(t.converged);
  CHECK(t.iterations == 2500);

  std::vector<long> ks;
  for (const auto& s : t.iterates) ks.push_back(s.k);
  for (size_t i = 1; i < ks.size(); ++i) CHECK(ks[i] > ks[i - 1]);
  // Dense prefix 0..999.
  for (long k = 0; k < 1000; ++k) CHECK(ks[static_cast<size_t>(k)] == k);
  // Sparse tail: every 100th, plus the final pair 2499, 2500.
  for (long k : {1000L, 1100L, 2400L, 2499L, 2500L}) {
    CHECK(std::find(ks.begin(), ks.end(), k) != ks.end());
  }
  CHECK(std::find(ks.begin(), ks.end(), 1050L) == ks.end());
  CHECK(ks.back() == 2500);
}

TEST_CASE("zero is absorbing for tau <= U and escaped for tau > U") {
  Params hard(2.0, 1.0);
  // tau = 1.5 < L: sequence from 2.0 decays, hits exact 0, and stays.
  Trajectory t = pie::irl1_run(2.0, 1.5, hard);
  CHECK(t.converged);
  CHECK(t.limit == 0.0);
  REQUIRE(t.hit_zero_at.has_value());
  CHECK(*t.hit_zero_at > 0);
  for (const auto& s : t.iterates) {
    if (s.k >= *t.hit_zero_at) CHECK(s.x == 0.0);
  }

  // tau = 2.5 > U: zero is escaped immediately and iterates increase to x1.
  Trajectory e = pie::irl1_run(0.0, 2.5, hard);
  CHECK(e.converged);
  CHECK_FALSE((e.hit_zero_at.has_value() && *e.hit_zero_at > 0));
  for (size_t i = 2; i < e.iterates.size(); ++i) {
    CHECK(e.iterates[i].x > e.iterates[i - 1].x);
  }
  CHECK(std::fabs(e.limit - 2.2993524190701786) <= 1e-9);
}

TEST_CASE("predict_limit covers the trichotomy") {
  Params soft(1.0, 2.0);
  LimitPrediction a = pie::predict_limit(3.0, 0.4, soft);
  CHECK(a.kind == LimitKind::ZERO);
  CHECK(a.value == 0.0);
  CHECK(a.in_prox_set);
  LimitPrediction b = pie::predict_limit(0.0, 1.0, soft);
  CHECK(b.kind == LimitKind::X1);
  CHECK(b.value == doctest::Approx(0.63624276162088126).epsilon(1e-13));
  CHECK(b.in_prox_set);

  Params hard(2.0, 1.0);
  Thresholds th = pie::tau_bar(hard);

  // tau < L: zero regardless of x0.
  LimitPrediction c = pie::predict_limit(5.0, 1.5, hard);
  CHECK(c.kind == LimitKind::ZERO);
  CHECK(c.in_prox_set);

  // tau > U: x1 regardless of x0.
  LimitPrediction d = pie::predict_limit(0.0, 2.5, hard);
  CHECK(d.kind == LimitKind::X1);
  CHECK(d.in_prox_set);

  // L < tau < tau_bar, x0 above the knife edge: converges to x1, which is
  // not a prox point (deviation).
  LimitPrediction e = pie::predict_limit(1.0, 1.70, hard);
  CHECK(e.kind == LimitKind::X1);
  CHECK(e.value == doctest::Approx(0.81254780947871489).epsilon(1e-12));
  CHECK_FALSE(e.in_prox_set);

  // Same tau, x0 below the knife edge: falls to 0, the true prox point.
  LimitPrediction f = pie::predict_limit(0.1, 1.70, hard);
  CHECK(f.kind == LimitKind::ZERO);
  CHECK(f.in_prox_set);

  // tau_bar < tau < U, x0 below the knife edge: falls to 0, but the prox
  // point is x1 (deviation on the other side).
  LimitPrediction g = pie::predict_limit(0.05, 1.9, hard);
  CHECK(g.kind == LimitKind::ZERO);
  CHECK_FALSE(g.in_prox_set);

  // Knife edge: x0 = x2(tau) exactly stays at x2, never a prox point.
  double knife = pie::x2(1.80, hard);
  LimitPrediction h = pie::predict_limit(knife, 1.80, hard);
  CHECK(h.kind == LimitKind::X2);
  CHECK(h.value == doctest::Approx(knife).epsilon(1e-15));
  CHECK_FALSE(h.in_prox_set);

  // At the tie threshold from x0 >= x2(tau_bar): limit x1 = x_star, in prox.
  LimitPrediction i = pie::predict_limit(2.0, th.tau_bar, hard);
  CHECK(i.kind == LimitKind::X1);
  CHECK(i.in_prox_set);
}

TEST_CASE("simulation agrees with prediction across both regimes") {
  std::mt19937_64 rng(20240812);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int c = 0; c < 40; ++c) {
    double sigma = std::exp(-1.0 + 2.0 * u01(rng));
    double ratio = (c % 2 == 0) ? 0.1 + 0.85 * u01(rng) : 1.05 + 8.0 * u01(rng);
    Params p(ratio * sigma * sigma, sigma);
    double U = p.upper_landmark();

    std::vector<double> inits = {0.0, 0.7 * sigma, 3.0 * sigma};
    if (p.regime() == pie::Regime::HARD) {
      double x2bar = pie::x2(pie::tau_bar(p).tau_bar, p);
      inits.push_back(0.5 * x2bar);
      inits.push_back(p.mid_landmark());
    }
    for (int j = 0; j < 20; ++j) {
      double tau = (j + 0.5) / 20.0 * 2.0 * U;
      for (double x0 : inits) {
        LimitPrediction pred = pie::predict_limit(x0, tau, p);
        Trajectory run = pie::irl1_run(x0, tau, p, 1e-13, 200000);
        CHECK(std::fabs(run.limit - pred.value) <= 1e-7);
      }
    }
  }
}

TEST_CASE("knife edge is theoretically fixed but numerically repelling") {
  Params hard(2.0, 1.0);
  double tau = 1.80;
  double knife = pie::x2(tau, hard);
  // Starting exactly on the computed knife edge: the first steps move by at
  // most a few ulps, so the run converges immediately near x2.
  Trajectory t = pie::irl1_run(knife, tau, hard, 1e-12, 10000);
  CHECK(std::fabs(t.limit - knife) <= 1e-5);
  // A perturbation of 1e-6 in either direction selects the neighboring basin.
  Trajectory up = pie::irl1_run(knife + 1e-6, tau, hard, 1e-13, 200000);
  CHECK(std::fabs(up.limit - pie::x1(tau, hard)) <= 1e-8);
  Trajectory dn = pie::irl1_run(knife - 1e-6, tau, hard, 1e-13, 200000);
  CHECK(std::fabs(dn.limit) <= 1e-8);
}

TEST_CASE("deviation_region cases and endpoint values") {
  Params soft(1.0, 2.0);
  RegionReport rs = pie::deviation_region(1.0, soft);
  CHECK(rs.case_label == "none");
  CHECK(rs.deviation_intervals.empty());

  Params hard(2.0, 1.0);
  Thresholds th = pie::tau_bar(hard);
  double x2bar = pie::x2(th.tau_bar, hard);
  CHECK(x2bar == doctest::Approx(0.34139542341621364).epsilon(1e-11));

  // Case ii: x0 >= M -> [L, tau_bar).
  RegionReport r2 = pie::deviation_region(1.0, hard);
  CHECK(r2.case_label == "ii");
  REQUIRE(r2.deviation_intervals.size() == 1);
  CHECK(r2.deviation_intervals[0].lo == doctest::Approx(th.lower).epsilon(1e-15));
  CHECK(r2.deviation_intervals[0].hi == doctest::Approx(th.tau_bar).epsilon(1e-15));
  CHECK(r2.deviation_intervals[0].lo_closed);
  CHECK_FALSE(r2.deviation_intervals[0].hi_closed);

  // Case iii: x2(tau_bar) < x0 < M -> [x2^{-1}(x0), tau_bar).
  RegionReport r3 = pie::deviation_region(0.5, hard);
  CHECK(r3.case_label == "iii");
  REQUIRE(r3.deviation_intervals.size() == 1);
  CHECK(r3.deviation_intervals[0].lo ==
        doctest::Approx(pie::x2_inverse(0.5, hard)).epsilon(1e-15));
  CHECK(r3.deviation_intervals[0].lo ==
        doctest::Approx(1.7130613194252668).epsilon(1e-13));
  CHECK(r3.deviation_intervals[0].hi == doctest::Approx(th.tau_bar).epsilon(1e-15));
  CHECK(r3.deviation_intervals[0].lo_closed);
  CHECK_FALSE(r3.deviation_intervals[0].hi_closed);

  // Case iv: x0 = x2(tau_bar) -> the single point {tau_bar}.
  RegionReport r4 = pie::deviation_region(x2bar, hard);
  CHECK(r4.case_label == "iv");
  REQUIRE(r4.deviation_intervals.size() == 1);
  CHECK(r4.deviation_intervals[0].lo == r4.deviation_intervals[0].hi);
  CHECK(r4.deviation_intervals[0].lo == doctest::Approx(th.tau_bar).epsilon(1e-15));
  CHECK(r4.deviation_intervals[0].lo_closed);
  CHECK(r4.deviation_intervals[0].hi_closed);

  // Case v: 0 <= x0 < x2(tau_bar) -> (tau_bar, x2^{-1}(x0)].
  RegionReport r5 = pie::deviation_region(0.2, hard);
  CHECK(r5.case_label == "v");
  REQUIRE(r5.deviation_intervals.size() == 1);
  CHECK(r5.deviation_intervals[0].lo == doctest::Approx(th.tau_bar).epsilon(1e-15));
  CHECK(r5.deviation_intervals[0].hi ==
        doctest::Approx(1.8374615061559638).epsilon(1e-13));
  CHECK_FALSE(r5.deviation_intervals[0].lo_closed);
  CHECK(r5.deviation_intervals[0].hi_closed);

  // x0 a touch below x2(tau_bar): a narrow case-v interval just above tau_bar.
  RegionReport r5b = pie::deviation_region(0.3393, hard);
  CHECK(r5b.case_label == "v");
  REQUIRE(r5b.deviation_intervals.size() == 1);
  CHECK(r5b.deviation_intervals[0].lo < 1.7638);
  CHECK(r5b.deviation_intervals[0].hi >= 1.7638);
}

TEST_CASE("deviation_region is sound against simulation") {
  Params hard(2.0, 1.0);
  for (double x0 : {1.0, 0.5, 0.2}) {
    RegionReport r = pie::deviation_region(x0, hard);
    REQUIRE(r.deviation_intervals.size() == 1);
    const DeviationInterval& iv = r.deviation_intervals[0];
    if (iv.hi - iv.lo < 1e-9) continue;  // knife-edge point, untestable by runs
    for (int j = 0; j < 25; ++j) {
      double tau = iv.lo + (iv.hi - iv.lo) * (j + 0.5) / 25.0;
      Trajectory t = pie::irl1_run(x0, tau, hard, 1e-13, 1000000);
      CHECK(prox_dist(t.limit, tau, hard) > 1e-7);  // limit misses the prox set
    }
    // Just outside both endpoints the limit is a prox point again.
    for (double tau : {iv.lo - 1e-3, iv.hi + 1e-3}) {
      if (tau <= 0.0) continue;
      Trajectory t = pie::irl1_run(x0, tau, hard, 1e-13, 1000000);
      CHECK(prox_dist(t.limit, tau, hard) <= 1e-7);
    }
  }
}

TEST_CASE("adaptive_init removes the deviation") {
  Params soft(1.0, 2.0);
  CHECK(pie::adaptive_init(0.4, soft) == 0.0);
  CHECK(pie::adaptive_init(0.5, soft) == 0.0);  // tau = U -> zero side
  CHECK(pie::adaptive_init(1.0, soft) == 1.0);

  Params hard(2.0, 1.0);
  Thresholds th = pie::tau_bar(hard);
  CHECK(pie::adaptive_init(1.70, hard) == 0.0);
  CHECK(pie::adaptive_init(th.tau_bar, hard) == 0.0);  // tie resolved to 0
  CHECK(pie::adaptive_init(1.77, hard) == 1.77);

  std::mt19937_64 rng(20240813);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int c = 0; c < 25; ++c) {
    double sigma = std::exp(-1.0 + 2.0 * u01(rng));
    double ratio = (c % 2 == 0) ? 0.1 + 0.85 * u01(rng) : 1.05 + 8.0 * u01(rng);
    Params p(ratio * sigma * sigma, sigma);
    for (int j = 0; j < 20; ++j) {
      double tau = (j + 0.5) / 20.0 * 2.0 * p.upper_landmark();
      double x0 = pie::adaptive_init(tau, p);
      Trajectory t = pie::irl1_run(x0, tau, p, 1e-13, 1000000);
      CHECK(prox_dist(t.limit, tau, p) <= 1e-8);
    }
  }
}

TEST_CASE("error_bounds preconditions and pinned values") {
  Params soft(1.0, 2.0);
  CHECK_THROWS_AS(pie::error_bounds(1, 0.4, soft), std::domain_error);  // tau <= U
  CHECK_THROWS_AS(pie::error_bounds(0, 1.0, soft), std::invalid_argument);
  Params hard(2.0, 1.0);
  CHECK_THROWS_AS(pie::error_bounds(1, 1.70, hard), std::domain_error);  // tau <= tau_bar

  // 60-digit references.
  auto [lo2, up2] = pie::error_bounds(2, 1.0, soft);
  CHECK(lo2 == doctest::Approx(0.0083636755985610833).epsilon(1e-12));
  CHECK(up2 == doctest::Approx(0.012033028377397955).epsilon(1e-12));
  auto [lo3, up3] = pie::error_bounds(3, 2.5, hard);
  CHECK(lo3 == doctest::Approx(0.00088780032736205397).epsilon(1e-12));
  CHECK(up3 == doctest::Approx(0.0016208234538408901).epsilon(1e-12));

  // Bounds decay geometrically to 0.
  auto [lo50, up50] = pie::error_bounds(50, 1.0, soft);
  CHECK(lo50 < 1e-30);
  CHECK(up50 < 1e-30);
  CHECK(lo50 <= up50);
}

TEST_CASE("error sequence is sandwiched strictly between the bounds") {
  struct Setup {
    double lambda, sigma;
    std::vector<double> taus;
  };
  Params soft(1.0, 2.0);
  Params hard(2.0, 1.0);
  double tb = pie::tau_bar(hard).tau_bar;

  for (int variant = 0; variant < 2; ++variant) {
    const Params& p = variant == 0 ? soft : hard;
    double lo_tau = variant == 0 ? 0.5 : tb;
    double hi_tau = variant == 0 ? 1.5 : 3.0;
    for (int j = 1; j <= 10; ++j) {
      double tau = lo_tau + (hi_tau - lo_tau) * j / 10.0;
      std::vector<double> d = pie::error_sequence(25, tau, p);
      REQUIRE(d.size() == 26);
      CHECK(d[0] == doctest::Approx(tau - pie::x1(tau, p)).epsilon(1e-15));
      for (long k = 1; k <= 25; ++k) {
        auto [lo, up] = pie::error_bounds(k, tau, p);
        CHECK(lo < d[static_cast<size_t>(k)]);
        CHECK(d[static_cast<size_t>(k)] < up);
      }
    }
  }
}

TEST_CASE("error sequence matches direct iteration while above ulp level") {
  Params soft(1.0, 2.0);
  double tau = 1.0;
  double v1 = pie::x1(tau, soft);
  std::vector<double> d = pie::error_sequence(10, tau, soft);
  double x = tau;
  for (long k = 0; k <= 10; ++k) {
    CHECK(std::fabs((x - v1) - d[static_cast<size_t>(k)]) <= 1e-14);
    x = pie::irl1_step(x, tau, soft);
  }
}

TEST_CASE("qlinear rate pinned values and empirical ratio") {
  Params soft(1.0, 2.0);
  Params hard(2.0, 1.0);
  CHECK(pie::qlinear_rate(1.0, soft) ==
        doctest::Approx(0.18187861918955937).epsilon(1e-13));
  CHECK(pie::qlinear_rate(2.5, hard) ==
        doctest::Approx(0.20064758092982142).epsilon(1e-13));
  CHECK_THROWS_AS(pie::qlinear_rate(0.4, soft), std::domain_error);

  // Successive error ratios approach the rate (exact recurrence keeps
  // precision far past where double iterates saturate).
  std::vector<double> d = pie::error_sequence(31, 1.0, soft);
  double ratio = d[31] / d[30];
  CHECK(std::fabs(ratio - pie::qlinear_rate(1.0, soft)) <= 1e-4);
}
