#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mcf/expander_curve.hpp"

using namespace mcf;

namespace {

// Reference values frozen from a Richardson-verified run: the step 1e-3
// integration agrees with a step 1e-4 one to below 3e-12 pointwise.
struct GoldenRow {
  Real s, x, y, theta, k;
};
const GoldenRow kGolden_l1_r1[] = {
    {0.0, 0.0, 1.0, 0.0, 1.0},
    {1.0, 0.88469050882859457, 1.4101316562941966, 0.76009593441573819,
     0.41247722277495197},
    {2.0, 1.5194977330196673, 2.1810416632370382, 0.94417449949302834,
     0.048175337995459741},
    {4.0, 2.6699654027935056, 3.8170014906947101, 0.96040391167880246,
     3.202134596881219e-05},
    {6.0, 3.8163337851691548, 5.4558546054929336, 0.9604105051453935,
     3.8980421412244693e-10},
};
const Real kTau1 = 1.920821010290872;           // total curvature at (1, 1)
const Real kR0HalfPi = 0.73856453597545624;     // shoot(1, pi/2), oracle run

}  // namespace

TEST_CASE("r0 = 0 gives the straight line through the origin") {
  auto c = integrate_expander_curve({1.0, 0.0}, 5.0, 1e-3);
  CHECK(c.k.abs().maxCoeff() == 0.0);
  CHECK(c.y.abs().maxCoeff() == 0.0);
  CHECK(c.theta.abs().maxCoeff() == 0.0);
  CHECK(c.x[c.center()] == 0.0);
  CHECK(c.x[c.size() - 1] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(total_curvature(c) == 0.0);
  CHECK(asymptotic_angle(c) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(curve_residual(c) == 0.0);

  auto inv = conserved_invariant(c);
  CHECK(inv.max_relative_deviation == 0.0);
  CHECK(inv.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("k(0) = lambda * r0 and base point normalization") {
  auto c = integrate_expander_curve({1.0, 1.0}, 6.0, 1e-3);
  const auto mid = c.sample(c.center());
  CHECK(mid.k == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mid.position.x() == 0.0);
  CHECK(mid.position.y() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mid.theta == 0.0);

  auto c2 = integrate_expander_curve({2.0, 0.75}, 6.0, 1e-3);
  CHECK(c2.k[c2.center()] == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("golden samples at (lambda=1, r0=1, s_max=6, step=1e-3)") {
  auto c = integrate_expander_curve({1.0, 1.0}, 6.0, 1e-3);
  for (const auto& row : kGolden_l1_r1) {
    const Index i = c.center() + static_cast<Index>(std::llround(row.s / c.step));
    CAPTURE(row.s);
    CHECK(c.x[i] == doctest::Approx(row.x).epsilon(1e-8));
    CHECK(c.y[i] == doctest::Approx(row.y).epsilon(1e-8));
    CHECK(c.theta[i] == doctest::Approx(row.theta).epsilon(1e-8));
    CHECK(std::abs(c.k[i] - row.k) <= 1e-8 * std::abs(row.k) + 1e-14);
  }
}

TEST_CASE("conserved invariant: analytic value and flatness") {
  auto c = integrate_expander_curve({1.0, 1.0}, 6.0, 1e-3);
  auto inv = conserved_invariant(c);
  // lambda*r0*exp(lambda*r0^2/2) = e^(1/2)
  CHECK(inv.values[c.center()] ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  CHECK(inv.max_relative_deviation < 1e-6);
  CHECK(!inv.saturated);
}

TEST_CASE("invariant flatness and convexity across the family") {
  for (Real lambda : {0.5, 1.0, 2.0}) {
    for (Real r0 : {0.25, 0.5, 1.0, 2.0}) {
      CAPTURE(lambda);
      CAPTURE(r0);
      auto c = integrate_expander_curve({lambda, r0}, 6.0 / std::sqrt(lambda),
                                        1e-3);
      CHECK(conserved_invariant(c).max_relative_deviation < 1e-6);
      CHECK(c.k.minCoeff() > 0.0);  // convexity
    }
  }
}

TEST_CASE("even symmetry under s -> -s, x -> -x") {
  auto c = integrate_expander_curve({1.0, 1.0}, 6.0, 1e-3);
  const Index n = c.size();
  Real worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Index j = n - 1 - i;
    worst = std::max(worst, std::abs(c.x[i] + c.x[j]));
    worst = std::max(worst, std::abs(c.y[i] - c.y[j]));
    worst = std::max(worst, std::abs(c.theta[i] + c.theta[j]));
    worst = std::max(worst, std::abs(c.k[i] - c.k[j]));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("scaling covariance: (lambda, r0) -> (lambda/c^2, c*r0)") {
  const Real c_scale = 2.0;
  auto base = integrate_expander_curve({1.0, 1.0}, 3.0, 1e-3);
  auto scaled = integrate_expander_curve({1.0 / (c_scale * c_scale), c_scale},
                                         3.0 * c_scale, c_scale * 1e-3);
  REQUIRE(base.size() == scaled.size());
  Real worst = 0.0;
  for (Index i = 0; i < base.size(); ++i) {
    worst = std::max(worst, std::abs(c_scale * base.x[i] - scaled.x[i]));
    worst = std::max(worst, std::abs(c_scale * base.y[i] - scaled.y[i]));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("total curvature: trapezoid vs endpoint tangents") {
  auto c = integrate_expander_curve({1.0, 1.0}, 6.0, 1e-3);
  const Real tau = total_curvature(c);
  CHECK(tau == doctest::Approx(kTau1).epsilon(1e-10));
  const Real theta_route = c.theta[c.size() - 1] - c.theta[0];
  CHECK(std::abs(tau - theta_route) < 1e-6);
}

TEST_CASE("angle plus total curvature equals pi") {
  for (Real r0 : {0.25, 0.5, 1.0, 2.0}) {
    CAPTURE(r0);
    auto c = integrate_until_asymptotic({1.0, r0});
    CHECK(std::abs(total_curvature(c) + asymptotic_angle(c) - kPi) < 1e-3);
  }
}

TEST_CASE("asymptotic angle refuses when curvature has not decayed") {
  // s_max=6 leaves k(s_max)/k(0) ~ 1e-8 at r0=0.25: above the 1e-10 gate.
  auto c = integrate_expander_curve({1.0, 0.25}, 6.0, 1e-3);
  CHECK_THROWS_AS((void)asymptotic_angle(c), NotYetAsymptotic);
  // The adaptive integrator extends s_max until the gate holds.
  auto ok = integrate_until_asymptotic({1.0, 0.25});
  CHECK_NOTHROW((void)asymptotic_angle(ok));
}

TEST_CASE("alpha is strictly decreasing in r0") {
  Real prev = kPi + 1.0;
  for (Real r0 : {0.25, 0.5, 1.0, 2.0, 3.0}) {
    auto c = integrate_until_asymptotic({1.0, r0});
    const Real alpha = asymptotic_angle(c);
    CAPTURE(r0);
    CHECK(alpha < prev);
    prev = alpha;
  }
}

TEST_CASE("shooting: exact and golden targets") {
  CHECK(shoot_for_angle(1.0, kPi) == 0.0);
  CHECK(shoot_for_angle(1.0, kPi / 2.0) ==
        doctest::Approx(kR0HalfPi).epsilon(1e-6));
}

TEST_CASE("shooting round-trips the family parameter") {
  for (Real r0 : {0.5, 1.0, 2.0}) {
    CAPTURE(r0);
    auto c = integrate_until_asymptotic({1.0, r0});
    const Real back = shoot_for_angle(1.0, asymptotic_angle(c));
    CHECK(std::abs(back - r0) < 1e-4);
  }
}

TEST_CASE("shooting rejects unattainable and invalid targets") {
  CHECK_THROWS_AS((void)shoot_for_angle(1.0, -0.5), ValidationError);
  CHECK_THROWS_AS((void)shoot_for_angle(1.0, 4.0), ValidationError);
  CHECK_THROWS_AS((void)shoot_for_angle(-1.0, 1.0), ValidationError);
}

TEST_CASE("curve residual is second order in the step") {
  const Real r4 = curve_residual(integrate_expander_curve({1, 1}, 6.0, 4e-3));
  const Real r2 = curve_residual(integrate_expander_curve({1, 1}, 6.0, 2e-3));
  const Real r1 = curve_residual(integrate_expander_curve({1, 1}, 6.0, 1e-3));
  CHECK(r1 < 1e-6);
  CHECK(r4 / r2 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(r2 / r1 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS((void)integrate_expander_curve({1.0, 1.0}, 6.0, -1e-3),
                  ValidationError);
  CHECK_THROWS_AS((void)integrate_expander_curve({1.0, 1.0}, 5e-3, 1e-3),
                  ValidationError);
  CHECK_THROWS_AS((void)integrate_expander_curve({-1.0, 1.0}, 6.0, 1e-3),
                  ValidationError);
  CHECK_THROWS_AS((void)integrate_expander_curve({1.0, -0.5}, 6.0, 1e-3),
                  ValidationError);
}

TEST_CASE("csv export shape") {
  auto c = integrate_expander_curve({1.0, 1.0}, 0.1, 1e-2);
  std::ostringstream out;
  write_curve_csv(c, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "s,x,y,theta,k,r,invariant");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == c.size());
}

TEST_CASE("invariant overflow is reported as saturation, not an error") {
  // lambda r^2 / 2 exceeds 700 near the endpoints of this window
  auto c = integrate_expander_curve({2.0, 1.0}, 30.0, 1e-2);
  CHECK(c.invariant_saturated);
  CHECK(std::isinf(c.invariant[0]));
  auto inv = conserved_invariant(c);
  CHECK(inv.saturated);
  CHECK(std::isfinite(inv.max_relative_deviation));
}
