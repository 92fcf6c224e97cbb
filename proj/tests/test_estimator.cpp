#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "rosb/estimator.hpp"
#include "rosb/rng.hpp"

using namespace rosb;

namespace {

Measurement meas(const Vec2& p, const Vec2& q, long step) {
  return {p, (p - q).norm(), step};
}

// Three points with a guaranteed minimum triangle area so the system is
// well conditioned.
std::array<Vec2, 3> random_scene(Rng& rng) {
  for (;;) {
    Vec2 a{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    Vec2 b{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    Vec2 c{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (std::abs(cross) > 0.02) return {a, b, c};
  }
}

}  // namespace

TEST_CASE("noiseless three-point scenes recover the target exactly") {
  Rng rng(101);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec2 q{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)};
    const auto pts = random_scene(rng);
    SlidingLs ls(30);
    for (int i = 0; i < 3; ++i) ls.push(meas(pts[i], q, i));
    const Estimate est = ls.solve();
    REQUIRE(est.valid);
    worst = std::max(worst, (est.q_hat - q).norm());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(worst < 1e-9);
  CHECK(elapsed < 1.0);
}

TEST_CASE("solution matches an independent least-squares solve") {
  // Fixed noisy instance; the expected values come from solving the same
  // linear system (rows 2 p_i . q - s = |p_i|^2 - d_i^2) with a reference
  // dense lstsq implementation.
  const Vec2 pts[6] = {{0.0, 0.0},  {0.1, 0.05},  {0.2, -0.15},
                       {0.05, -0.25}, {-0.1, 0.1}, {0.3, 0.1}};
  const double ranges[6] = {0.26965824035672525, 0.21143203435596428,
                            0.07091067811865474, 0.2509,
                            0.40281288741492743, 0.20665528128088306};
  SlidingLs ls(30);
  for (int i = 0; i < 6; ++i) ls.push({pts[i], ranges[i], i});
  const Estimate est = ls.solve();
  REQUIRE(est.valid);
  CHECK(est.q_hat.x == doctest::Approx(0.24977031130916294).epsilon(1e-9));
  CHECK(est.q_hat.y == doctest::Approx(-0.09939990542688906).epsilon(1e-9));
  CHECK(est.aux == doctest::Approx(0.0724883579387354).epsilon(1e-7));
  CHECK(est.residual_rms < 1e-3);
}

TEST_CASE("fewer than three measurements is not solvable") {
  SlidingLs ls(10);
  CHECK_THROWS_AS(ls.solve(), InsufficientData);
  ls.push({{0.1, 0.2}, 0.3, 0});
  ls.push({{0.2, 0.1}, 0.25, 1});
  CHECK_THROWS_AS(ls.solve(), InsufficientData);
  ls.push({{0.0, 0.3}, 0.35, 2});
  CHECK_NOTHROW(ls.solve());
}

TEST_CASE("window smaller than three is rejected") {
  CHECK_THROWS_AS(SlidingLs(2), std::invalid_argument);
  CHECK_NOTHROW(SlidingLs(3));
}

TEST_CASE("collinear scenes are flagged invalid, not mis-solved") {
  const Vec2 q{0.1, 0.2};
  SlidingLs ls(30);
  for (int i = 0; i < 8; ++i) ls.push(meas({0.05 * i, 0.0}, q, i));
  const Estimate est = ls.solve();
  CHECK_FALSE(est.valid);
  CHECK(est.condition > SlidingLs::kMaxCondition);
}

TEST_CASE("mirror targets are indistinguishable from a line of sensors") {
  // Same ranges from a line of positions, so no solver could tell them apart.
  const Vec2 q_up{0.1, 0.2};
  const Vec2 q_down{0.1, -0.2};
  for (int i = 0; i < 8; ++i) {
    const Vec2 p{0.05 * i, 0.0};
    CHECK((p - q_up).norm() == doctest::Approx((p - q_down).norm()).epsilon(1e-15));
  }
}

TEST_CASE("the window is a FIFO of bounded size") {
  SlidingLs ls(5);
  for (int i = 0; i < 9; ++i) ls.push({{0.01 * i, 0.02 * i}, 0.1, i});
  CHECK(ls.size() == 5);
  CHECK(ls.window() == 5);
  CHECK(ls.buffer().front().step == 4);
  CHECK(ls.buffer().back().step == 8);
  ls.clear();
  CHECK(ls.size() == 0);
}

TEST_CASE("estimates tighten as the window grows under noise") {
  // Average error over many trials must drop when 10x more measurements are
  // available. Loose bound; this is a property, not a calibration.
  Rng rng(55);
  const Vec2 q{0.15, -0.1};
  auto mean_err = [&](int n_points) {
    double total = 0.0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
      SlidingLs ls(n_points);
      for (int i = 0; i < n_points; ++i) {
        const double ang = rng.uniform(0.0, 2.0 * 3.141592653589793);
        const Vec2 p{0.3 * std::cos(ang), 0.3 * std::sin(ang)};
        ls.push({p, (p - q).norm() + rng.normal(0.0, 0.001), i});
      }
      const Estimate est = ls.solve();
      REQUIRE(est.valid);
      total += (est.q_hat - q).norm();
    }
    return total / trials;
  };
  const double err_small = mean_err(10);
  const double err_large = mean_err(100);
  CHECK(err_large < err_small);
}

TEST_CASE("condition number reflects geometry quality") {
  const Vec2 q{0.0, 0.0};
  SlidingLs spread(30);
  SlidingLs bunched(30);
  for (int i = 0; i < 12; ++i) {
    const double wide = 2.0 * kPi * i / 12.0;
    const double narrow = 0.02 * i;
    const Vec2 pw{0.3 * std::cos(wide), 0.3 * std::sin(wide)};
    const Vec2 pb{0.3 * std::cos(narrow), 0.3 * std::sin(narrow)};
    spread.push(meas(pw, q, i));
    bunched.push(meas(pb, q, i));
  }
  const Estimate wide_est = spread.solve();
  const Estimate narrow_est = bunched.solve();
  REQUIRE(wide_est.valid);
  CHECK(wide_est.condition < narrow_est.condition);
}
