#include <doctest.h>

#include <cmath>

#include "mcf/flow.hpp"

using namespace mcf;

TEST_CASE("init_cone construction") {
  auto c = init_cone(kPi / 2.0, 10.0, 400);
  CHECK(c.points.size() >= 399);
  CHECK(c.time == 0.0);
  // endpoints on the rays at the far radius
  CHECK(c.points.front().norm() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(c.points.back().norm() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(c.points.front().x() < 0.0);
  CHECK(c.points.back().x() > 0.0);
  // right angle between the rays
  const Vector2 dl = -c.points.front().normalized();
  const Vector2 dr = c.points.back().normalized();
  CHECK(std::acos(-dl.dot(dr)) == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  // the vertex appears exactly once
  int zeros = 0;
  for (const auto& p : c.points)
    if (p.norm() == 0.0) ++zeros;
  CHECK(zeros == 1);

  // boundary behavior of the angle validation
  CHECK_NOTHROW((void)init_cone(kPi - 1e-6, 10.0, 64));
  CHECK_THROWS_AS((void)init_cone(kPi, 10.0, 64), ValidationError);
  CHECK_THROWS_AS((void)init_cone(-0.1, 10.0, 64), ValidationError);
  CHECK_THROWS_AS((void)init_cone(1.0, 10.0, 8), ValidationError);
}

TEST_CASE("straight line through the origin is a fixed point") {
  FlowCurve line;
  line.cone_angle = kPi;  // degenerate cone: rays (+-1, 0)
  line.far_radius = 5.0;
  const int n = 101;
  for (int i = 0; i < n; ++i)
    line.points.emplace_back(-5.0 + 10.0 * i / (n - 1), 0.0);
  FlowConfig cfg;
  auto next = csf_step(line, cfg);
  Real moved = 0.0;
  for (size_t i = 0; i < line.points.size(); ++i)
    moved = std::max(moved, (next.points[i] - line.points[i]).norm());
  CHECK(moved < 1e-12);
}

TEST_CASE("shrinking circle matches the exact radius law") {
  FlowCurve c = init_circle(1.0, 400);
  FlowConfig cfg;
  cfg.resample_every = 0;
  auto snaps = run_csf(c, cfg, {0.1, 0.25});
  for (const auto& s : snaps) {
    const Real exact = std::sqrt(1.0 - 2.0 * s.time);
    for (const auto& p : s.points)
      CHECK(std::abs(p.norm() - exact) < 1e-3);
  }
  // discrete curvature of the polygon is 1/R, turning left
  const auto k = discrete_signed_curvature(init_circle(2.0, 400));
  for (size_t i = 0; i < k.size(); i += 37)
    CHECK(k[i] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("cone flow: smoothing, convexity, curvature decay") {
  FlowCurve start = resample_uniform(init_cone(kPi / 2.0, 10.0, 400));
  FlowConfig cfg;
  auto snaps = run_csf(start, cfg, {0.1, 0.5, 1.0});

  // positive discrete curvature away from the far-field clamping region
  const auto k = discrete_signed_curvature(snaps.back());
  const size_t margin = 30;
  Real kmin = 1e300;
  for (size_t i = margin; i + margin < k.size(); ++i)
    kmin = std::min(kmin, k[i]);
  CHECK(kmin > 0.0);

  // the curvature maximum decreases monotonically after the transient
  Real prev = 1e300;
  for (const auto& s : snaps) {
    const auto ks = discrete_signed_curvature(s);
    Real kmax = 0.0;
    for (Real v : ks) kmax = std::max(kmax, std::abs(v));
    CHECK(kmax < prev);
    prev = kmax;
  }
}

TEST_CASE("expander orbit rescales to itself") {
  auto curve = integrate_expander_curve({1.0, 1.0}, 6.0, 1e-3);
  const Real t = 0.7, lambda = 1.0;
  const Real scale = std::sqrt(1.0 + 2.0 * lambda * t);
  FlowCurve orbit;
  orbit.time = t;
  orbit.cone_angle =
      asymptotic_angle(integrate_until_asymptotic({1.0, 1.0}));
  orbit.far_radius = 8.0;
  for (Index i = 0; i < curve.size(); ++i)
    orbit.points.emplace_back(scale * curve.x[i], scale * curve.y[i]);
  CHECK(rescaled_compare(orbit, curve, lambda) < 1e-8);
}

TEST_CASE("cone flow converges to the shooting expander") {
  const Real alpha = kPi / 2.0, lambda = 1.0;
  const Real r0 = shoot_for_angle(lambda, alpha);
  const ExpanderCurve expander = integrate_until_asymptotic({lambda, r0});

  FlowCurve start = resample_uniform(init_cone(alpha, 10.0, 400));
  FlowConfig cfg;
  const Real off = cone_orbit_time_offset(lambda);
  auto snaps = run_csf(start, cfg, {0.5 + off, 1.0 + off, 2.0 + off});
  std::vector<Real> d;
  for (size_t i = 0; i < snaps.size(); ++i) {
    FlowCurve s = snaps[i];
    s.time -= off;  // orbit clock
    d.push_back(rescaled_compare(s, expander, lambda));
  }
  CHECK(d[2] < 5e-2);
  CHECK(d[1] < d[0]);
  CHECK(d[2] < d[1]);

  // mesh refinement n -> 2n changes the final distance by < 2x
  FlowCurve fine = resample_uniform(init_cone(alpha, 10.0, 800));
  auto fine_snaps = run_csf(fine, cfg, {2.0 + off});
  FlowCurve s8 = fine_snaps[0];
  s8.time -= off;
  const Real d8 = rescaled_compare(s8, expander, lambda);
  CHECK(std::abs(d8 - d[2]) < 2.0 * d[2]);
}

TEST_CASE("rescaled_compare guards") {
  auto expander = integrate_until_asymptotic({1.0, 1.0});
  FlowCurve wrong = init_cone(kPi / 3.0, 10.0, 100);
  CHECK_THROWS_AS((void)rescaled_compare(wrong, expander, 1.0),
                  ValidationError);
}

TEST_CASE("resampling keeps endpoints and count, and spreads arc length") {
  auto c = init_cone(kPi / 2.0, 10.0, 101);
  auto r = resample_uniform(c);
  CHECK(r.points.size() == c.points.size());
  CHECK((r.points.front() - c.points.front()).norm() < 1e-12);
  CHECK((r.points.back() - c.points.back()).norm() < 1e-12);
  Real mn = 1e300, mx = 0.0;
  for (size_t i = 0; i + 1 < r.points.size(); ++i) {
    const Real L = (r.points[i + 1] - r.points[i]).norm();
    mn = std::min(mn, L);
    mx = std::max(mx, L);
  }
  CHECK(mx / mn < 1.8);  // near-uniform despite the corner
}

TEST_CASE("dt safety validation") {
  FlowCurve c = init_circle(1.0, 64);
  FlowConfig cfg;
  cfg.dt_safety = 0.7;
  CHECK_THROWS_AS((void)csf_step(c, cfg), ValidationError);
}
