#ifndef MCF_EXPANDER_CURVE_HPP
#define MCF_EXPANDER_CURVE_HPP

#include <ostream>

#include "mcf/types.hpp"

namespace mcf {

// Parameters of a self-expanding planar curve: the curve satisfies
// k = lambda * <Gamma, xi> where xi is the left-rotated unit tangent,
// and r0 is its distance to the origin. r0 = 0 degenerates to a
// straight line through the origin.
struct ExpanderParams {
  Real lambda = 1.0;
  Real r0 = 1.0;
};

struct CurveSample {
  Real s;
  Vector2 position;
  Real theta;
  Real k;
  Real r;
};

// Arc-length sampled solution of the expander curve ODE, normalized so
// that the sample at s = 0 sits at (0, r0) with horizontal tangent.
// Stored as columns over the uniform arc-length grid
// s in {-s_max, ..., s_max}. Immutable after construction.
struct ExpanderCurve {
  ExpanderParams params;
  Real step = 0.0;
  ArrayX s;          // signed arc length
  ArrayX x, y;       // position
  ArrayX theta;      // tangent angle, Gamma' = (cos theta, sin theta)
  ArrayX k;          // signed curvature, k = lambda*<Gamma, xi>
  ArrayX r;          // |Gamma|
  ArrayX invariant;  // k * exp(lambda r^2 / 2), +inf where the exponent overflows
  bool invariant_saturated = false;

  Index size() const { return s.size(); }
  Index center() const { return (s.size() - 1) / 2; }
  CurveSample sample(Index i) const {
    return {s[i], Vector2(x[i], y[i]), theta[i], k[i], r[i]};
  }
};

// Integrates the first-order system
//   x' = cos(theta), y' = sin(theta),
//   theta' = lambda * (-x sin(theta) + y cos(theta))
// from (0, r0, 0) in both arc-length directions with classical RK4.
// r0 = 0 is emitted as the exact straight line along the x-axis.
ExpanderCurve integrate_expander_curve(const ExpanderParams& params, Real s_max,
                                       Real step);

struct InvariantSeries {
  ArrayX values;
  Real max_relative_deviation = 0.0;
  bool saturated = false;
};

// The function k * exp(lambda r^2 / 2) sampled along the curve, with the
// maximum relative deviation from its value at s = 0 (which is
// lambda * r0 * exp(lambda r0^2 / 2)).
InvariantSeries conserved_invariant(const ExpanderCurve& curve);

// Trapezoid rule for the total curvature integral of k ds.
Real total_curvature(const ExpanderCurve& curve);

// Opening angle of the asymptotic cone, pi - (theta(s_max) - theta(-s_max)),
// reading the endpoint tangents as the cone ray directions. Requires the
// curvature to have decayed at the endpoints:
// |k(+-s_max)| < decay_ratio_tol * k(0); throws NotYetAsymptotic otherwise.
Real asymptotic_angle(const ExpanderCurve& curve, Real decay_ratio_tol = 1e-10);

struct IntegrateOptions {
  Real step = 1e-3;
  Real s_max_hint = 0.0;         // 0: use 6 / sqrt(lambda)
  Real decay_ratio_tol = 1e-10;  // endpoint decay target for the angle
  Real s_max_cap_factor = 48.0;  // give up beyond cap_factor / sqrt(lambda)
};

// Integrates with s_max grown geometrically until the endpoint decay needed
// by asymptotic_angle holds. Family sweeps and the shooting solver use this
// so larger r0 (slower relative decay at fixed s_max) still resolve.
ExpanderCurve integrate_until_asymptotic(const ExpanderParams& params,
                                         const IntegrateOptions& opts = {});

struct ShootOptions {
  Real angle_tol = 1e-6;
  IntegrateOptions integrate = {};
  Real max_r0 = 1024.0;
};

// Inverts the family map r0 -> asymptotic opening angle by bisection on a
// doubling bracket. The map is checked to be decreasing on the bracket
// endpoints; a violation throws PropertyViolation rather than silently
// trusting monotonicity.
Real shoot_for_angle(Real lambda, Real alpha_target,
                     const ShootOptions& opts = {});

// Self-consistency of the integrator: max over interior samples of
// |k_fd - k| where k_fd is the centered difference of theta and k the stored
// algebraic value lambda*<Gamma, xi>.
Real curve_residual(const ExpanderCurve& curve);

// CSV export: header s,x,y,theta,k,r,invariant, one row per sample,
// 17 significant digits.
void write_curve_csv(const ExpanderCurve& curve, std::ostream& out);

}  // namespace mcf

#endif  // MCF_EXPANDER_CURVE_HPP
