#include "mcf/charts.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace mcf {

namespace {

// n-th derivative of cos/sin.
Real dcos(Real t, int order) {
  switch (order & 3) {
    case 0: return std::cos(t);
    case 1: return -std::sin(t);
    case 2: return -std::cos(t);
    default: return std::sin(t);
  }
}
Real dsin(Real t, int order) {
  switch (order & 3) {
    case 0: return std::sin(t);
    case 1: return std::cos(t);
    case 2: return -std::sin(t);
    default: return -std::cos(t);
  }
}

Eigen::VectorXi grid2(int a, int b) {
  Eigen::VectorXi g(2);
  g << a, b;
  return g;
}

VectorX vec2(Real a, Real b) {
  VectorX v(2);
  v << a, b;
  return v;
}

// Multi-derivative counts per axis from an index list.
std::array<int, 2> orders2(std::initializer_list<int> idx) {
  std::array<int, 2> o{0, 0};
  for (int i : idx) ++o[static_cast<size_t>(i)];
  return o;
}

Chart make_chart2(
    int n, VectorX lo, VectorX hi, Eigen::VectorXi grid,
    std::function<VectorX(const VectorX&, int, int)> deriv,
    std::string name) {
  Chart c;
  c.dim_domain = 2;
  c.dim_ambient = n;
  c.lo = std::move(lo);
  c.hi = std::move(hi);
  c.grid = std::move(grid);
  c.fd_step = default_fd_step(c.lo, c.hi, c.grid);
  c.name = std::move(name);
  c.position = [deriv](const VectorX& u) { return deriv(u, 0, 0); };
  c.d1 = [deriv](const VectorX& u, int i) {
    auto o = orders2({i});
    return deriv(u, o[0], o[1]);
  };
  c.d2 = [deriv](const VectorX& u, int i, int j) {
    auto o = orders2({i, j});
    return deriv(u, o[0], o[1]);
  };
  c.d3 = [deriv](const VectorX& u, int i, int j, int k) {
    auto o = orders2({i, j, k});
    return deriv(u, o[0], o[1]);
  };
  return c;
}

}  // namespace

Chart sphere_chart(Real radius) {
  auto deriv = [radius](const VectorX& u, int a, int b) {
    VectorX F(3);
    F[0] = radius * dcos(u[0], a) * dcos(u[1], b);
    F[1] = radius * dcos(u[0], a) * dsin(u[1], b);
    F[2] = (b == 0) ? radius * dsin(u[0], a) : 0.0;
    return F;
  };
  return make_chart2(3, vec2(-0.9, 0.2), vec2(0.9, 1.4), grid2(9, 9), deriv,
                     "sphere");
}

Chart cylinder_chart(Real radius) {
  auto deriv = [radius](const VectorX& u, int a, int b) {
    VectorX F = VectorX::Zero(3);
    if (b == 0) {
      F[0] = radius * dcos(u[0], a);
      F[1] = radius * dsin(u[0], a);
    }
    if (a == 0) {
      if (b == 0) F[2] = u[1];
      else if (b == 1) F[2] = 1.0;
    }
    return F;
  };
  return make_chart2(3, vec2(0.2, -1.0), vec2(1.4, 1.0), grid2(9, 9), deriv,
                     "cylinder");
}

Chart plane_chart() {
  auto deriv = [](const VectorX& u, int a, int b) {
    VectorX F = VectorX::Zero(3);
    if (a == 0 && b == 0) { F[0] = u[0]; F[1] = u[1]; }
    else if (a == 1 && b == 0) F[0] = 1.0;
    else if (a == 0 && b == 1) F[1] = 1.0;
    return F;
  };
  return make_chart2(3, vec2(-1.0, -1.0), vec2(1.0, 1.0), grid2(9, 9), deriv,
                     "plane");
}

Chart line_chart() {
  Chart c;
  c.dim_domain = 1;
  c.dim_ambient = 2;
  c.lo = VectorX::Constant(1, -1.0);
  c.hi = VectorX::Constant(1, 1.0);
  c.grid = Eigen::VectorXi::Constant(1, 17);
  c.fd_step = default_fd_step(c.lo, c.hi, c.grid);
  c.name = "line";
  auto deriv = [](const VectorX& u, int order) {
    VectorX F = VectorX::Zero(2);
    if (order == 0) F[0] = u[0];
    else if (order == 1) F[0] = 1.0;
    return F;
  };
  c.position = [deriv](const VectorX& u) { return deriv(u, 0); };
  c.d1 = [deriv](const VectorX& u, int) { return deriv(u, 1); };
  c.d2 = [deriv](const VectorX& u, int, int) { return deriv(u, 2); };
  c.d3 = [deriv](const VectorX& u, int, int, int) { return deriv(u, 3); };
  return c;
}

Chart torus_chart(Real a, Real b) {
  auto deriv = [a, b](const VectorX& u, int oa, int ob) {
    VectorX F = VectorX::Zero(4);
    if (ob == 0) {
      F[0] = a * dcos(u[0], oa);
      F[1] = a * dsin(u[0], oa);
    }
    if (oa == 0) {
      F[2] = b * dcos(u[1], ob);
      F[3] = b * dsin(u[1], ob);
    }
    return F;
  };
  return make_chart2(4, vec2(0.2, 0.2), vec2(1.3, 1.3), grid2(9, 9), deriv,
                     "torus");
}

Chart cone_surface_chart(Real half_angle) {
  if (!(half_angle > 0.0 && half_angle < 0.5 * kPi))
    throw ValidationError("cone half-angle must lie in (0, pi/2)");
  const Real sb = std::sin(half_angle), cb = std::cos(half_angle);
  // (r, phi) -> r * (cos(phi) sin(b), sin(phi) sin(b), cos(b)),
  // truncated away from the vertex.
  auto deriv = [sb, cb](const VectorX& u, int a, int b) {
    VectorX F = VectorX::Zero(3);
    Real radial = 0.0;
    if (a == 0) radial = u[0];
    else if (a == 1) radial = 1.0;
    F[0] = radial * sb * dcos(u[1], b);
    F[1] = radial * sb * dsin(u[1], b);
    F[2] = (b == 0) ? radial * cb : 0.0;
    return F;
  };
  return make_chart2(3, vec2(0.5, 0.2), vec2(2.0, 1.4), grid2(9, 9), deriv,
                     "cone");
}

namespace {

// Monomial exponent table for cubic height functions, order
// [1, x, y, x^2, xy, y^2, x^3, x^2 y, x y^2, y^3].
constexpr int kMonoP[10] = {0, 1, 0, 2, 1, 0, 3, 2, 1, 0};
constexpr int kMonoQ[10] = {0, 0, 1, 0, 1, 2, 0, 1, 2, 3};

Real falling(int p, int a) {
  int f = 1;
  for (int i = 0; i < a; ++i) f *= (p - i);
  return static_cast<Real>(f);
}

Real cubic_eval(const VectorX& coef, Real x, Real y, int a, int b) {
  Real acc = 0.0;
  for (int mi = 0; mi < 10 && mi < coef.size(); ++mi) {
    const int p = kMonoP[mi], q = kMonoQ[mi];
    if (p < a || q < b) continue;
    acc += coef[mi] * falling(p, a) * falling(q, b) *
           std::pow(x, p - a) * std::pow(y, q - b);
  }
  return acc;
}

}  // namespace

Chart graph_chart(const std::vector<VectorX>& height_coeffs) {
  if (height_coeffs.empty())
    throw ValidationError("graph chart needs at least one height function");
  const int extra = static_cast<int>(height_coeffs.size());
  auto deriv = [height_coeffs, extra](const VectorX& u, int a, int b) {
    VectorX F = VectorX::Zero(2 + extra);
    if (a + b == 0) { F[0] = u[0]; F[1] = u[1]; }
    else if (a == 1 && b == 0) F[0] = 1.0;
    else if (a == 0 && b == 1) F[1] = 1.0;
    for (int c = 0; c < extra; ++c)
      F[2 + c] = cubic_eval(height_coeffs[c], u[0], u[1], a, b);
    return F;
  };
  return make_chart2(2 + extra, vec2(-0.5, -0.5), vec2(0.5, 0.5), grid2(9, 9),
                     deriv, "graph");
}

Chart paraboloid_chart() {
  VectorX c = VectorX::Zero(10);
  c[3] = 1.0;  // x^2
  c[5] = 3.0;  // 3 y^2
  Chart chart = graph_chart({c});
  chart.name = "paraboloid";
  return chart;
}

Chart random_cubic_graph_chart() {
  // Fixed coefficients, drawn once; generic enough to make both sides of
  // the normal-curvature identity nonzero.
  VectorX c1(10), c2(10);
  c1 << 0.0, 0.13, -0.41, 0.52, 0.87, -0.32, 0.21, -0.55, 0.34, 0.18;
  c2 << 0.0, -0.27, 0.09, -0.44, 0.61, 0.73, -0.15, 0.29, -0.62, 0.41;
  Chart chart = graph_chart({c1, c2});
  chart.name = "graph4";
  return chart;
}

Chart perturbed_torus_chart(Real a, Real b, Real eps) {
  auto deriv = [a, b, eps](const VectorX& u, int oa, int ob) {
    VectorX F = VectorX::Zero(4);
    if (ob == 0) {
      F[0] = a * dcos(u[0], oa);
      F[1] = a * dsin(u[0], oa);
    }
    if (oa == 0) {
      F[2] = b * dcos(u[1], ob);
      F[3] = b * dsin(u[1], ob);
    }
    F[3] += eps * dsin(u[0], oa) * dsin(u[1], ob);
    return F;
  };
  return make_chart2(4, vec2(0.2, 0.2), vec2(1.3, 1.3), grid2(9, 9), deriv,
                     "perturbed_torus");
}

CurveInterpolant::CurveInterpolant(const ExpanderCurve& curve) {
  if (curve.size() < 2) throw ValidationError("curve has too few samples");
  n_ = curve.size();
  s0_ = curve.s[0];
  step_ = curve.step;
  x_ = curve.x;
  y_ = curve.y;
  theta_ = curve.theta;
  k_ = curve.k;
}

Vector2 CurveInterpolant::evaluate(Real s, int order) const {
  const Real pos = (s - s0_) / step_;
  Index i = static_cast<Index>(std::floor(pos));
  i = std::max<Index>(0, std::min(i, n_ - 2));
  const Real tau = pos - static_cast<Real>(i);

  // Two-point quintic Hermite from position, tangent and curvature vector.
  auto knot = [&](Index j, Vector2& P, Vector2& T, Vector2& S) {
    P = {x_[j], y_[j]};
    const Real ct = std::cos(theta_[j]), st = std::sin(theta_[j]);
    T = {ct, st};
    S = {-k_[j] * st, k_[j] * ct};
  };
  Vector2 P0, T0, S0, P1, T1, S1;
  knot(i, P0, T0, S0);
  knot(i + 1, P1, T1, S1);

  const Real h = step_;
  std::array<Vector2, 6> c;
  c[0] = P0;
  c[1] = h * T0;
  c[2] = 0.5 * h * h * S0;
  const Vector2 R0 = P1 - (c[0] + c[1] + c[2]);
  const Vector2 R1 = h * T1 - (c[1] + 2.0 * c[2]);
  const Vector2 R2 = h * h * S1 - 2.0 * c[2];
  c[3] = 10.0 * R0 - 4.0 * R1 + 0.5 * R2;
  c[4] = -15.0 * R0 + 7.0 * R1 - R2;
  c[5] = 6.0 * R0 - 3.0 * R1 + 0.5 * R2;

  Vector2 acc = Vector2::Zero();
  Real tp = 1.0;
  for (int r = order; r <= 5; ++r) {
    Real fall = 1.0;
    for (int q = 0; q < order; ++q) fall *= static_cast<Real>(r - q);
    acc += fall * tp * c[static_cast<size_t>(r)];
    tp *= tau;
  }
  Real scale = 1.0;
  for (int q = 0; q < order; ++q) scale /= h;
  return scale * acc;
}

Chart product_with_flat(const ExpanderCurve& curve, int extra_dims,
                        const ProductOptions& opts) {
  if (curve.size() == 0) throw ValidationError("empty curve");
  if (extra_dims < 0) throw ValidationError("extra_dims must be >= 0");

  const Real curve_s_max = curve.s[curve.size() - 1];
  Real s_half = opts.s_half > 0.0
                    ? opts.s_half
                    : std::min(3.0 / std::sqrt(curve.params.lambda),
                               0.8 * curve_s_max);
  if (s_half > curve_s_max - 2.0 * curve.step)
    throw ValidationError("product chart s-range exceeds the curve samples");

  auto interp = std::make_shared<CurveInterpolant>(curve);
  const int q = extra_dims;

  Chart c;
  c.dim_domain = 1 + q;
  c.dim_ambient = 2 + q;
  c.lo.resize(1 + q);
  c.hi.resize(1 + q);
  c.grid.resize(1 + q);
  c.lo[0] = -s_half;
  c.hi[0] = s_half;
  c.grid[0] = opts.n_s;
  for (int j = 0; j < q; ++j) {
    c.lo[1 + j] = -opts.t_half;
    c.hi[1 + j] = opts.t_half;
    c.grid[1 + j] = opts.n_t;
  }
  c.fd_step = default_fd_step(c.lo, c.hi, c.grid);
  c.name = "product";
  c.flat_dims = q;

  const int n = 2 + q;
  c.position = [interp, n](const VectorX& u) {
    VectorX F = VectorX::Zero(n);
    F.head<2>() = interp->evaluate(u[0], 0);
    for (int j = 2; j < n; ++j) F[j] = u[j - 1];
    return F;
  };
  c.d1 = [interp, n](const VectorX& u, int i) {
    VectorX F = VectorX::Zero(n);
    if (i == 0) F.head<2>() = interp->evaluate(u[0], 1);
    else F[i + 1] = 1.0;
    return F;
  };
  c.d2 = [interp, n](const VectorX& u, int i, int j) {
    VectorX F = VectorX::Zero(n);
    if (i == 0 && j == 0) F.head<2>() = interp->evaluate(u[0], 2);
    return F;
  };
  // Third derivative by a centered difference of the interpolant's second
  // derivative at half the knot spacing. The quintic's own third derivative
  // divides knot-fit residuals by step^3 and is round-off limited near 1e-4;
  // differencing the (knot-pinned, O(step^4)-accurate) second derivative at
  // half-knot separation decorrelates that noise and lands near 1e-7.
  const Real d3_delta = 0.5 * interp->knot_step();
  c.d3 = [interp, n, d3_delta](const VectorX& u, int i, int j, int k) {
    VectorX F = VectorX::Zero(n);
    if (i == 0 && j == 0 && k == 0)
      F.head<2>() = (interp->evaluate(u[0] + d3_delta, 2) -
                     interp->evaluate(u[0] - d3_delta, 2)) /
                    (2.0 * d3_delta);
    return F;
  };
  return c;
}

ExpanderCurve read_curve_csv(std::istream& in, Real lambda) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("s,x,y,theta,k,r,invariant", 0) != 0)
    throw ValidationError("curve CSV: missing or wrong header");
  std::vector<std::array<Real, 7>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<Real, 7> row{};
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c < 7; ++c) {
      if (!std::getline(ls, cell, ','))
        throw ValidationError("curve CSV: short row");
      row[static_cast<size_t>(c)] = std::strtod(cell.c_str(), nullptr);
    }
    rows.push_back(row);
  }
  if (rows.size() < 3) throw ValidationError("curve CSV: too few rows");

  ExpanderCurve c;
  const Index n = static_cast<Index>(rows.size());
  c.s.resize(n); c.x.resize(n); c.y.resize(n); c.theta.resize(n);
  c.k.resize(n); c.r.resize(n); c.invariant.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<size_t>(i)];
    c.s[i] = row[0]; c.x[i] = row[1]; c.y[i] = row[2]; c.theta[i] = row[3];
    c.k[i] = row[4]; c.r[i] = row[5]; c.invariant[i] = row[6];
  }
  c.step = c.s[1] - c.s[0];
  for (Index i = 1; i < n; ++i)
    if (std::abs((c.s[i] - c.s[i - 1]) - c.step) > 1e-9 * (1.0 + std::abs(c.step)))
      throw ValidationError("curve CSV: non-uniform arc-length grid");
  c.params.lambda = lambda;
  c.params.r0 = c.y[c.center()];
  return c;
}

}  // namespace mcf
