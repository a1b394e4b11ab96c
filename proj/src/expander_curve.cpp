#include "mcf/expander_curve.hpp"

#include <cmath>
#include <limits>

#include "mcf/io.hpp"

namespace mcf {

namespace {

// State (theta, v, w) of the unit-speed curve, where v = <Gamma, T> and
// w = <Gamma, xi> are the tangential and normal components of the position.
// The expander relation closes the system:
//   theta' = k = lambda*w,   v' = 1 + lambda*w^2,   w' = -lambda*v*w.
// Positions are recovered algebraically as
//   x = v cos(theta) - w sin(theta),  y = v sin(theta) + w cos(theta),
// which reproduces x' = cos(theta), y' = sin(theta) identically. Carrying w
// instead of (x, y) matters: in the tail k decays like exp(-lambda r^2/2)
// and evaluating it as lambda*(-x sin(theta) + y cos(theta)) cancels
// catastrophically, which floods the conserved quantity k*exp(lambda r^2/2)
// with round-off. The multiplicative equation for w keeps k fully accurate
// in the relative sense at any decay level.
Vector3 ode_rhs(Real lambda, const Vector3& q) {
  const Real v = q[1];
  const Real w = q[2];
  return {lambda * w, 1.0 + lambda * w * w, -lambda * v * w};
}

Vector3 rk4_step(Real lambda, const Vector3& q, Real h) {
  const Vector3 k1 = ode_rhs(lambda, q);
  const Vector3 k2 = ode_rhs(lambda, q + 0.5 * h * k1);
  const Vector3 k3 = ode_rhs(lambda, q + 0.5 * h * k2);
  const Vector3 k4 = ode_rhs(lambda, q + h * k3);
  return q + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
}

ExpanderCurve straight_line(const ExpanderParams& params, Index n_side,
                            Real step) {
  ExpanderCurve c;
  c.params = params;
  c.step = step;
  const Index n = 2 * n_side + 1;
  c.s.resize(n);
  c.x.resize(n);
  c.y.resize(n);
  c.theta = ArrayX::Zero(n);
  c.k = ArrayX::Zero(n);
  c.invariant = ArrayX::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const Real s = static_cast<Real>(i - n_side) * step;
    c.s[i] = s;
    c.x[i] = s;
    c.y[i] = 0.0;
  }
  c.r = c.x.abs();
  return c;
}

}  // namespace

ExpanderCurve integrate_expander_curve(const ExpanderParams& params, Real s_max,
                                       Real step) {
  if (!(params.lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (!(params.r0 >= 0.0)) throw ValidationError("r0 must be non-negative");
  if (!(step > 0.0)) throw ValidationError("step must be positive");
  if (!(s_max >= 10.0 * step))
    throw ValidationError("s_max must be at least 10*step");

  const Index n_side = static_cast<Index>(std::llround(s_max / step));
  if (params.r0 == 0.0) return straight_line(params, n_side, step);

  ExpanderCurve c;
  c.params = params;
  c.step = step;
  const Index n = 2 * n_side + 1;
  c.s.resize(n);
  c.x.resize(n);
  c.y.resize(n);
  c.theta.resize(n);
  c.k.resize(n);

  const Index mid = n_side;
  const Vector3 q0(0.0, 0.0, params.r0);  // theta = 0, v = 0, w = r0
  auto store = [&](Index i, const Vector3& q) {
    const Real theta = q[0], v = q[1], w = q[2];
    const Real ct = std::cos(theta), st = std::sin(theta);
    c.s[i] = static_cast<Real>(i - mid) * step;
    c.x[i] = v * ct - w * st;
    c.y[i] = v * st + w * ct;
    c.theta[i] = theta;
    c.k[i] = params.lambda * w;
  };
  store(mid, q0);

  Vector3 q = q0;
  for (Index i = mid + 1; i < n; ++i) {
    q = rk4_step(params.lambda, q, step);
    store(i, q);
  }
  q = q0;
  for (Index i = mid - 1; i >= 0; --i) {
    q = rk4_step(params.lambda, q, -step);
    store(i, q);
  }

  c.r = (c.x.square() + c.y.square()).sqrt();

  // exp(lambda r^2 / 2) overflows for large domains; those samples are
  // flagged saturated instead of failing the run.
  c.invariant.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Real expo = 0.5 * params.lambda * c.r[i] * c.r[i];
    if (expo > 700.0) {
      c.invariant[i] = std::numeric_limits<Real>::infinity();
      c.invariant_saturated = true;
    } else {
      c.invariant[i] = c.k[i] * std::exp(expo);
    }
  }
  return c;
}

InvariantSeries conserved_invariant(const ExpanderCurve& curve) {
  if (curve.size() == 0) throw ValidationError("empty curve");
  InvariantSeries out;
  out.values = curve.invariant;
  out.saturated = curve.invariant_saturated;
  if (curve.params.r0 == 0.0) {
    out.max_relative_deviation = 0.0;
    return out;
  }
  const Real ref = curve.invariant[curve.center()];
  Real dev = 0.0;
  for (Index i = 0; i < curve.size(); ++i) {
    if (!std::isfinite(curve.invariant[i])) continue;
    dev = std::max(dev, std::abs(curve.invariant[i] - ref) / std::abs(ref));
  }
  out.max_relative_deviation = dev;
  return out;
}

Real total_curvature(const ExpanderCurve& curve) {
  if (curve.size() == 0) throw ValidationError("empty curve");
  const Index n = curve.size();
  const Real interior = curve.k.segment(1, n - 2).sum();
  return curve.step * (interior + 0.5 * (curve.k[0] + curve.k[n - 1]));
}

Real asymptotic_angle(const ExpanderCurve& curve, Real decay_ratio_tol) {
  if (curve.size() == 0) throw ValidationError("empty curve");
  if (curve.params.r0 > 0.0) {
    const Real k0 = std::abs(curve.k[curve.center()]);
    const Real k_end =
        std::max(std::abs(curve.k[0]), std::abs(curve.k[curve.size() - 1]));
    if (!(k_end < decay_ratio_tol * k0)) {
      throw NotYetAsymptotic(
          "curvature has not decayed at the endpoints; increase s_max "
          "(endpoint curvature " +
              format_real(k_end) + ", ratio " + format_real(k_end / k0) + ")",
          k_end);
    }
  }
  return kPi - (curve.theta[curve.size() - 1] - curve.theta[0]);
}

ExpanderCurve integrate_until_asymptotic(const ExpanderParams& params,
                                         const IntegrateOptions& opts) {
  const Real scale = 1.0 / std::sqrt(params.lambda);
  Real s_max = opts.s_max_hint > 0.0 ? opts.s_max_hint : 6.0 * scale;
  const Real cap = opts.s_max_cap_factor * scale;
  for (;;) {
    ExpanderCurve c = integrate_expander_curve(params, s_max, opts.step);
    if (params.r0 == 0.0) return c;
    const Real k0 = std::abs(c.k[c.center()]);
    const Real k_end = std::max(std::abs(c.k[0]), std::abs(c.k[c.size() - 1]));
    if (k_end < opts.decay_ratio_tol * k0) return c;
    if (s_max >= cap) {
      throw NotYetAsymptotic(
          "endpoint curvature did not decay below tolerance before the s_max "
          "cap",
          k_end);
    }
    s_max = std::min(cap, 1.5 * s_max);
  }
}

Real shoot_for_angle(Real lambda, Real alpha_target, const ShootOptions& opts) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (!(alpha_target > 0.0 && alpha_target <= kPi))
    throw ValidationError("alpha_target must lie in (0, pi]");
  if (!(opts.angle_tol > 0.0)) throw ValidationError("tol must be positive");
  if (alpha_target == kPi) return 0.0;

  auto angle_at = [&](Real r0) {
    return asymptotic_angle(
        integrate_until_asymptotic({lambda, r0}, opts.integrate),
        opts.integrate.decay_ratio_tol);
  };

  // Doubling bracket: alpha(0) = pi > target, grow hi until alpha(hi) < target.
  Real lo = 0.0, alpha_lo = kPi;
  Real hi = 1.0 / std::sqrt(lambda);
  Real alpha_hi = angle_at(hi);
  if (alpha_hi >= kPi)
    throw PropertyViolation("family map r0 -> alpha failed to decrease");
  while (alpha_hi > alpha_target) {
    lo = hi;
    alpha_lo = alpha_hi;
    hi *= 2.0;
    if (hi > opts.max_r0)
      throw ValidationError(
          "bracket failure: alpha_target not achievable below r0 = " +
          format_real(opts.max_r0));
    alpha_hi = angle_at(hi);
    if (alpha_hi >= alpha_lo)
      throw PropertyViolation(
          "family map r0 -> alpha is not decreasing on the bracket");
  }

  for (int iter = 0; iter < 200; ++iter) {
    const Real mid = 0.5 * (lo + hi);
    const Real alpha_mid = angle_at(mid);
    if (std::abs(alpha_mid - alpha_target) < opts.angle_tol &&
        hi - lo < 1e-7 * (1.0 + mid))
      return mid;
    if (alpha_mid > alpha_target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * (1.0 + mid)) return 0.5 * (lo + hi);
  }
  return 0.5 * (lo + hi);
}

Real curve_residual(const ExpanderCurve& curve) {
  const Index n = curve.size();
  if (n < 3) return 0.0;
  Real worst = 0.0;
  for (Index i = 1; i + 1 < n; ++i) {
    const Real k_fd = (curve.theta[i + 1] - curve.theta[i - 1]) / (2.0 * curve.step);
    worst = std::max(worst, std::abs(k_fd - curve.k[i]));
  }
  return worst;
}

void write_curve_csv(const ExpanderCurve& curve, std::ostream& out) {
  out << "s,x,y,theta,k,r,invariant\n";
  for (Index i = 0; i < curve.size(); ++i) {
    out << format_real(curve.s[i]) << ',' << format_real(curve.x[i]) << ','
        << format_real(curve.y[i]) << ',' << format_real(curve.theta[i]) << ','
        << format_real(curve.k[i]) << ',' << format_real(curve.r[i]) << ','
        << format_real(curve.invariant[i]) << '\n';
  }
}

}  // namespace mcf
