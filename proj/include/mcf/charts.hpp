#ifndef MCF_CHARTS_HPP
#define MCF_CHARTS_HPP

#include <istream>
#include <memory>
#include <vector>

#include "mcf/chart.hpp"
#include "mcf/expander_curve.hpp"

namespace mcf {

// Analytic charts with closed-form derivatives through third order.
// Domains avoid coordinate singularities and the Gram-Schmidt frame's
// degenerate directions.
Chart sphere_chart(Real radius);            // m=2, n=3
Chart cylinder_chart(Real radius);          // m=2, n=3
Chart plane_chart();                        // m=2, n=3, through the origin
Chart line_chart();                         // m=1, n=2, through the origin
Chart torus_chart(Real a, Real b);          // m=2, n=4, S^1(a) x S^1(b)
Chart cone_surface_chart(Real half_angle);  // m=2, n=3, truncated off vertex

// Graph (u, v) -> (u, v, h_1(u,v), ..., h_c(u,v)) with cubic height
// functions. Coefficients per height in monomial order
// [1, x, y, x^2, xy, y^2, x^3, x^2 y, x y^2, y^3].
Chart graph_chart(const std::vector<VectorX>& height_coeffs);

// z = x^2 + 3 y^2, the bundled strictly-pinched test graph.
Chart paraboloid_chart();

// Codimension-2 graph into R^4 with fixed pseudo-random cubic coefficients.
Chart random_cubic_graph_chart();

// Torus with the second normal direction sheared by eps * sin(u0) sin(u1):
// breaks the parallel principal normal. Test oracle.
Chart perturbed_torus_chart(Real a, Real b, Real eps);

// Piecewise quintic Hermite interpolant of an expander curve. Position,
// tangent and curvature vector are matched exactly at every sample (the
// integrator carries all three), giving position error O(step^6) and
// third-derivative error O(step^3) against the underlying solution.
class CurveInterpolant {
 public:
  explicit CurveInterpolant(const ExpanderCurve& curve);

  Vector2 evaluate(Real s, int order) const;  // order 0..3
  Real s_min() const { return s0_; }
  Real s_max() const { return s0_ + step_ * static_cast<Real>(n_ - 1); }
  Real knot_step() const { return step_; }

 private:
  Real s0_ = 0.0, step_ = 0.0;
  Index n_ = 0;
  ArrayX x_, y_, theta_, k_;
};

struct ProductOptions {
  Real s_half = 0.0;   // 0: min(3/sqrt(lambda), 0.8 * curve s_max)
  Real t_half = 1.0;
  int n_s = 161;       // default grid resolution along the curve
  int n_t = 5;
};

// Chart for Gamma x R^q in R^(q+2), (s, t_1..t_q) -> (Gamma(s), t), with
// closed-form oracles from the curve interpolant. q = 0 returns the curve
// itself as a 1-dimensional chart.
Chart product_with_flat(const ExpanderCurve& curve, int extra_dims,
                        const ProductOptions& opts = {});

// Reads the curve CSV written by write_curve_csv. The expander constant is
// not part of the file and must be supplied by the caller.
ExpanderCurve read_curve_csv(std::istream& in, Real lambda);

}  // namespace mcf

#endif  // MCF_CHARTS_HPP
