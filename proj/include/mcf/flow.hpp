#ifndef MCF_FLOW_HPP
#define MCF_FLOW_HPP

#include <vector>

#include "mcf/expander_curve.hpp"
#include "mcf/types.hpp"

namespace mcf {

// Polyline evolving under curve shortening flow (velocity = curvature
// vector). Open curves carry cone far-field data: the endpoints are clamped
// to the cone rays at distance far_radius. closed = true is the test mode
// for shrinking circles; no rays then.
struct FlowCurve {
  std::vector<Vector2> points;
  Real time = 0.0;
  Real cone_angle = 0.0;
  Real far_radius = 0.0;
  bool closed = false;
};

struct FlowConfig {
  Real dt_safety = 0.25;   // explicit-step CFL factor, in (0, 0.5]
  int resample_every = 5;  // arc-length resampling cadence in the run loop
  Real lambda = 1.0;       // expander constant used for comparisons
};

// Boundary of the cone with opening angle alpha, symmetric about the
// y-axis, vertex at the origin, sampled with quadratic grading toward the
// vertex (which appears exactly once). Points run from the left ray down
// through the vertex and up the right ray.
FlowCurve init_cone(Real alpha, Real r_far, int n_points);

// Closed test mode: regular n-gon on the circle of the given radius.
FlowCurve init_circle(Real radius, int n_points);

// Discrete curvature vector at every point (circumscribed-circle formula
// through each point and its two neighbors; zero at collinear points and,
// for open curves, at the clamped endpoints).
std::vector<Vector2> discrete_curvature(const FlowCurve& curve);

// Signed scalar curvature (positive when turning left along the point
// order), same stencil.
std::vector<Real> discrete_signed_curvature(const FlowCurve& curve);

// One explicit step: every interior point moves by dt * curvature vector
// with dt = dt_safety * (min segment length)^2 capped by dt_cap (> 0).
// Endpoints are re-projected onto their cone rays at far_radius. Throws
// PropertyViolation when neighboring segments fold over each other.
FlowCurve csf_step(const FlowCurve& curve, const FlowConfig& config,
                   Real dt_cap = 0.0);

// Uniform arc-length resampling with the same point count.
FlowCurve resample_uniform(const FlowCurve& curve);

// Drives the flow to each requested time (strictly increasing), resampling
// every resample_every steps and whenever a segment collapses below 1e-9.
// Returns one snapshot per requested time.
std::vector<FlowCurve> run_csf(FlowCurve start, const FlowConfig& config,
                               const std::vector<Real>& times);

// Self-similar comparison: rescales the flow polyline by 1/sqrt(1+2*lambda*t),
// restricts both curves to the ball |x| <= 0.5*far_radius/sqrt(1+2*lambda*t),
// resamples both by arc length anchored at the y-axis crossing, and returns
// the max pointwise distance.
//
// Why this rescaling: if Gamma satisfies k = lambda*<Gamma, xi>, then
// F(s, t) := sqrt(1+2*lambda*t) * Gamma(s) moves with normal velocity
//   <dF/dt, nu> = lambda/sqrt(1+2*lambda*t) * <Gamma, xi>
//               = k/sqrt(1+2*lambda*t) = k_{F(t)},
// because curvature scales inversely with length. So t -> sqrt(1+2*lambda*t)
// * Gamma solves curve shortening flow exactly and dividing a flow by the
// same factor should converge to Gamma when the initial data is the
// matching cone.
Real rescaled_compare(const FlowCurve& curve, const ExpanderCurve& expander,
                      Real lambda);

// Clock offset between a flow started from exact cone data and the
// sqrt(1+2*lambda*t) orbit: every sqrt(c + 2*lambda*t) * Gamma solves the
// flow, the cone is the c -> 0 member, and matching
// 2*lambda*tau = 1 + 2*lambda*t gives t = tau - 1/(2*lambda). Drivers evolve
// cone data for duration t + offset and stamp the snapshot with orbit time t
// before comparing.
inline Real cone_orbit_time_offset(Real lambda) { return 0.5 / lambda; }

}  // namespace mcf

#endif  // MCF_FLOW_HPP
