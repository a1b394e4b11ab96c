#include "mcf/flow.hpp"

#include <algorithm>
#include <cmath>

namespace mcf {

namespace {

// Vector from p to the circumcenter of (a, p, b); false when collinear.
bool to_circumcenter(const Vector2& a, const Vector2& p, const Vector2& b,
                     Vector2& out) {
  const Real x1 = a.x(), y1 = a.y(), x2 = p.x(), y2 = p.y(), x3 = b.x(),
             y3 = b.y();
  const Real det = x1 * (y3 - y2) + x2 * (y1 - y3) + x3 * (y2 - y1);
  const Real scale = (a - p).norm() * (b - p).norm() * (a - b).norm();
  if (std::abs(det) < 1e-14 * std::max(scale, Real(1e-30))) return false;
  const Real xc = (x1 * x1 * (y3 - y2) + x2 * x2 * (y1 - y3) +
                   x3 * x3 * (y2 - y1) + (y1 - y2) * (y2 - y3) * (y3 - y1)) /
                  (2.0 * det);
  const Real yc = -(y1 * y1 * (x3 - x2) + y2 * y2 * (x1 - x3) +
                    y3 * y3 * (x2 - x1) +
                    (x1 - x2) * (x2 - x3) * (x3 - x1)) /
                  (2.0 * det);
  out = Vector2(xc - x2, yc - y2);
  return true;
}

Real min_segment(const FlowCurve& c) {
  Real mn = std::numeric_limits<Real>::infinity();
  const size_t n = c.points.size();
  const size_t last = c.closed ? n : n - 1;
  for (size_t i = 0; i < last; ++i)
    mn = std::min(mn, (c.points[(i + 1) % n] - c.points[i]).norm());
  return mn;
}

bool segments_intersect(const Vector2& a, const Vector2& b, const Vector2& c,
                        const Vector2& d) {
  auto cross = [](const Vector2& u, const Vector2& v) {
    return u.x() * v.y() - u.y() * v.x();
  };
  const Real d1 = cross(b - a, c - a);
  const Real d2 = cross(b - a, d - a);
  const Real d3 = cross(d - c, a - c);
  const Real d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Cone ray directions: the boundary rays of the cone with opening angle
// alpha, symmetric about the y-axis.
void cone_rays(Real alpha, Vector2& left, Vector2& right) {
  left = Vector2(-std::sin(alpha / 2.0), std::cos(alpha / 2.0));
  right = Vector2(std::sin(alpha / 2.0), std::cos(alpha / 2.0));
}

}  // namespace

FlowCurve init_cone(Real alpha, Real r_far, int n_points) {
  if (!(alpha > 0.0 && alpha < kPi))
    throw ValidationError("cone opening angle must lie in (0, pi)");
  if (!(r_far > 0.0)) throw ValidationError("far radius must be positive");
  if (n_points < 16) throw ValidationError("need at least 16 points");

  const int side = (n_points - 1) / 2;
  Vector2 left, right;
  cone_rays(alpha, left, right);

  FlowCurve c;
  c.cone_angle = alpha;
  c.far_radius = r_far;
  c.points.reserve(static_cast<size_t>(2 * side + 1));
  // Quadratic grading concentrates points near the vertex.
  for (int j = side; j >= 1; --j) {
    const Real r = r_far * std::pow(static_cast<Real>(j) / side, 2.0);
    c.points.push_back(r * left);
  }
  c.points.push_back(Vector2::Zero());
  for (int j = 1; j <= side; ++j) {
    const Real r = r_far * std::pow(static_cast<Real>(j) / side, 2.0);
    c.points.push_back(r * right);
  }
  return c;
}

FlowCurve init_circle(Real radius, int n_points) {
  if (!(radius > 0.0)) throw ValidationError("radius must be positive");
  if (n_points < 16) throw ValidationError("need at least 16 points");
  FlowCurve c;
  c.closed = true;
  c.points.reserve(static_cast<size_t>(n_points));
  for (int j = 0; j < n_points; ++j) {
    const Real phi = 2.0 * kPi * j / n_points;
    c.points.emplace_back(radius * std::cos(phi), radius * std::sin(phi));
  }
  return c;
}

std::vector<Vector2> discrete_curvature(const FlowCurve& curve) {
  const size_t n = curve.points.size();
  std::vector<Vector2> k(n, Vector2::Zero());
  if (n < 3) return k;
  const size_t begin = curve.closed ? 0 : 1;
  const size_t end = curve.closed ? n : n - 1;
  for (size_t i = begin; i < end; ++i) {
    const Vector2& prev = curve.points[(i + n - 1) % n];
    const Vector2& next = curve.points[(i + 1) % n];
    Vector2 to_center;
    if (to_circumcenter(prev, curve.points[i], next, to_center))
      k[i] = to_center / to_center.squaredNorm();
  }
  return k;
}

std::vector<Real> discrete_signed_curvature(const FlowCurve& curve) {
  const auto kvec = discrete_curvature(curve);
  const size_t n = curve.points.size();
  std::vector<Real> k(n, 0.0);
  for (size_t i = (curve.closed ? 0 : 1); i + (curve.closed ? 0 : 1) < n; ++i) {
    const Vector2& prev = curve.points[(i + n - 1) % n];
    const Vector2& next = curve.points[(i + 1) % n];
    const Vector2 e0 = curve.points[i] - prev;
    const Vector2 e1 = next - curve.points[i];
    const Real turn = e0.x() * e1.y() - e0.y() * e1.x();
    k[i] = (turn >= 0.0 ? 1.0 : -1.0) * kvec[i].norm();
  }
  return k;
}

FlowCurve csf_step(const FlowCurve& curve, const FlowConfig& config,
                   Real dt_cap) {
  if (!(config.dt_safety > 0.0 && config.dt_safety <= 0.5))
    throw ValidationError("dt_safety must lie in (0, 0.5]");
  const size_t n = curve.points.size();
  if (n < 3) throw ValidationError("flow curve needs at least 3 points");

  const Real hmin = min_segment(curve);
  Real dt = config.dt_safety * hmin * hmin;
  if (dt_cap > 0.0) dt = std::min(dt, dt_cap);

  const auto k = discrete_curvature(curve);
  FlowCurve next = curve;
  for (size_t i = 0; i < n; ++i) next.points[i] += dt * k[i];
  next.time = curve.time + dt;

  if (!curve.closed) {
    Vector2 left, right;
    cone_rays(curve.cone_angle, left, right);
    next.points.front() = curve.far_radius * left;
    next.points.back() = curve.far_radius * right;
  }

  // Fold-over detection between segments one apart.
  const size_t last = next.closed ? n : n - 1;
  for (size_t i = 0; i + 2 < last; ++i) {
    if (segments_intersect(next.points[i], next.points[i + 1],
                           next.points[(i + 2) % n], next.points[(i + 3) % n]))
      throw PropertyViolation(
          "flow curve self-intersected near segment " + std::to_string(i) +
          " at t = " + std::to_string(next.time));
  }
  return next;
}

FlowCurve resample_uniform(const FlowCurve& curve) {
  const size_t n = curve.points.size();
  if (n < 3) return curve;
  FlowCurve out = curve;
  std::vector<Real> arc(n + (curve.closed ? 1 : 0), 0.0);
  const size_t segs = curve.closed ? n : n - 1;
  for (size_t i = 0; i < segs; ++i)
    arc[i + 1] =
        arc[i] + (curve.points[(i + 1) % n] - curve.points[i]).norm();
  const Real total = arc.back();
  const size_t samples = curve.closed ? n : n;
  const Real step = curve.closed ? total / static_cast<Real>(n)
                                 : total / static_cast<Real>(n - 1);
  size_t seg = 0;
  for (size_t j = 0; j < samples; ++j) {
    const Real target = std::min(step * static_cast<Real>(j), total);
    while (seg + 1 < arc.size() - 1 && arc[seg + 1] < target) ++seg;
    const Real span = arc[seg + 1] - arc[seg];
    const Real w = span > 0.0 ? (target - arc[seg]) / span : 0.0;
    out.points[j] = (1.0 - w) * curve.points[seg % n] +
                    w * curve.points[(seg + 1) % n];
  }
  if (!curve.closed) {
    out.points.front() = curve.points.front();
    out.points.back() = curve.points.back();
  }
  return out;
}

std::vector<FlowCurve> run_csf(FlowCurve state, const FlowConfig& config,
                               const std::vector<Real>& times) {
  std::vector<FlowCurve> snapshots;
  snapshots.reserve(times.size());
  long steps = 0;
  for (Real target : times) {
    if (target < state.time)
      throw ValidationError("snapshot times must be increasing");
    while (state.time < target) {
      state = csf_step(state, config, target - state.time);
      ++steps;
      if (min_segment(state) < 1e-9 ||
          (config.resample_every > 0 && steps % config.resample_every == 0))
        state = resample_uniform(state);
    }
    snapshots.push_back(state);
  }
  return snapshots;
}

namespace {

struct ArcCurve {
  std::vector<Vector2> pts;
  std::vector<Real> arc;  // cumulative length, arc[0] = 0

  Vector2 at(Real s) const {
    // clamped linear interpolation in arc length
    if (s <= arc.front()) return pts.front();
    if (s >= arc.back()) return pts.back();
    size_t lo = 0, hi = arc.size() - 1;
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      (arc[mid] <= s ? lo : hi) = mid;
    }
    const Real span = arc[lo + 1] - arc[lo];
    const Real w = span > 0.0 ? (s - arc[lo]) / span : 0.0;
    return (1.0 - w) * pts[lo] + w * pts[lo + 1];
  }
};

// Contiguous run of points inside the ball of the given radius, arc-length
// parametrized with s = 0 at the (unique) y-axis crossing.
ArcCurve clip_and_parametrize(const std::vector<Vector2>& pts, Real radius) {
  // maximal run containing the smallest-|x| point
  size_t anchor = 0;
  for (size_t i = 1; i < pts.size(); ++i)
    if (std::abs(pts[i].x()) < std::abs(pts[anchor].x())) anchor = i;
  if (pts[anchor].norm() > radius)
    throw ValidationError("empty overlap window in rescaled comparison");
  size_t lo = anchor, hi = anchor;
  while (lo > 0 && pts[lo - 1].norm() <= radius) --lo;
  while (hi + 1 < pts.size() && pts[hi + 1].norm() <= radius) ++hi;
  if (hi - lo < 2)
    throw ValidationError("empty overlap window in rescaled comparison");

  ArcCurve out;
  out.pts.assign(pts.begin() + static_cast<long>(lo),
                 pts.begin() + static_cast<long>(hi) + 1);
  out.arc.resize(out.pts.size(), 0.0);
  for (size_t i = 1; i < out.pts.size(); ++i)
    out.arc[i] = out.arc[i - 1] + (out.pts[i] - out.pts[i - 1]).norm();

  // shift s = 0 to the y-axis crossing
  Real s_cross = 0.0;
  bool found = false;
  for (size_t i = 0; i + 1 < out.pts.size(); ++i) {
    const Real x0 = out.pts[i].x(), x1 = out.pts[i + 1].x();
    if ((x0 <= 0.0 && x1 >= 0.0) || (x0 >= 0.0 && x1 <= 0.0)) {
      const Real w = (x1 - x0) != 0.0 ? -x0 / (x1 - x0) : 0.0;
      s_cross = out.arc[i] + w * (out.arc[i + 1] - out.arc[i]);
      found = true;
      break;
    }
  }
  if (!found)
    throw ValidationError("no y-axis crossing inside the comparison window");
  for (auto& s : out.arc) s -= s_cross;
  return out;
}

}  // namespace

Real rescaled_compare(const FlowCurve& curve, const ExpanderCurve& expander,
                      Real lambda) {
  // The guard compares angles at 1e-3; a 1e-4 endpoint decay ratio already
  // pins the angle far tighter than that.
  const Real alpha_exp = asymptotic_angle(expander, 1e-4);
  if (std::abs(alpha_exp - curve.cone_angle) > 1e-3)
    throw ValidationError(
        "cone angle mismatch between the flow curve and the expander");

  const Real scale = 1.0 / std::sqrt(1.0 + 2.0 * lambda * curve.time);
  const Real window = 0.5 * curve.far_radius * scale;

  std::vector<Vector2> rescaled;
  rescaled.reserve(curve.points.size());
  for (const auto& p : curve.points) rescaled.push_back(scale * p);
  const ArcCurve flow_arc = clip_and_parametrize(rescaled, window);

  std::vector<Vector2> exp_pts;
  exp_pts.reserve(static_cast<size_t>(expander.size()));
  for (Index i = 0; i < expander.size(); ++i)
    exp_pts.emplace_back(expander.x[i], expander.y[i]);
  const ArcCurve exp_arc = clip_and_parametrize(exp_pts, window);

  const Real smax = std::min(
      std::min(-flow_arc.arc.front(), flow_arc.arc.back()),
      std::min(-exp_arc.arc.front(), exp_arc.arc.back()));
  if (!(smax > 0.0))
    throw ValidationError("empty overlap window in rescaled comparison");

  const int samples = 256;
  Real worst = 0.0;
  for (int j = 0; j <= samples; ++j) {
    const Real s = -smax + 2.0 * smax * j / samples;
    worst = std::max(worst, (flow_arc.at(s) - exp_arc.at(s)).norm());
  }
  return worst;
}

}  // namespace mcf
