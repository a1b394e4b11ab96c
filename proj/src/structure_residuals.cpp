#include "mcf/structure_residuals.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace mcf {

namespace {

Real resolve_h(Real h) { return h > 0.0 ? h : 1e-3; }

void require_margin(const Chart& chart, const VectorX& u, Real margin) {
  if (!chart.closed_form()) margin += 2.0 * chart.fd_step.maxCoeff();
  for (int i = 0; i < chart.dim_domain; ++i)
    if (u[i] - margin < chart.lo[i] || u[i] + margin > chart.hi[i])
      throw StencilError(
          "evaluation point too close to the domain boundary for the FD "
          "stencil");
}

VectorX shifted(const VectorX& u, int axis, Real delta) {
  VectorX v = u;
  v[axis] += delta;
  return v;
}

}  // namespace

PositionResiduals position_identity_residual(const Chart& chart,
                                             const VectorX& u, Real h) {
  h = resolve_h(h);
  require_margin(chart, u, h);
  const Jet jet = make_jet(chart, u);
  const int m = jet.m;

  auto s_at = [&](const VectorX& v) {
    return 0.5 * chart.position(v).squaredNorm();
  };

  // First differences of s and the embedded gradient.
  VectorX ds(m);
  for (int i = 0; i < m; ++i)
    ds[i] = (s_at(shifted(u, i, h)) - s_at(shifted(u, i, -h))) / (2.0 * h);
  const VectorX grad_coords = jet.g_inv * ds;

  PositionResiduals out;
  out.grad_s = (jet.dF * grad_coords - jet.F_top).norm();

  // Covariant Hessian of s against g + <F, A>.
  const Real s0 = s_at(u);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      Real d2s;
      if (i == j) {
        d2s = (s_at(shifted(u, i, h)) - 2.0 * s0 + s_at(shifted(u, i, -h))) /
              (h * h);
      } else {
        d2s = (s_at(shifted(shifted(u, i, h), j, h)) -
               s_at(shifted(shifted(u, i, h), j, -h)) -
               s_at(shifted(shifted(u, i, -h), j, h)) +
               s_at(shifted(shifted(u, i, -h), j, -h))) /
              (4.0 * h * h);
      }
      Real hess = d2s;
      for (int c = 0; c < m; ++c) hess -= jet.Gamma[c](i, j) * ds[c];
      const Real rhs = jet.g(i, j) + jet.F.dot(jet.A_at(i, j));
      out.hessian_s = std::max(out.hessian_s, std::abs(hess - rhs));
    }

  // nabla^perp_v F_perp + A(grad s, v).
  auto f_perp_at = [&](const VectorX& v) {
    const Jet j2 = make_jet(chart, v);
    return VectorX(j2.P_perp * j2.F);
  };
  for (int i = 0; i < m; ++i) {
    const VectorX dFp =
        (f_perp_at(shifted(u, i, h)) - f_perp_at(shifted(u, i, -h))) /
        (2.0 * h);
    VectorX lhs = jet.P_perp * dFp;
    for (int c = 0; c < m; ++c) lhs += jet.t[c] * jet.A_at(c, i);
    out.normal_derivative = std::max(out.normal_derivative, lhs.norm());
  }
  return out;
}

Real gauss_residual(const Chart& chart, const VectorX& u, int i, int j, int k,
                    int l, Real h) {
  h = resolve_h(h);
  require_margin(chart, u, h);
  const Jet jet = make_jet(chart, u);
  const int m = jet.m;
  if (i >= m || j >= m || k >= m || l >= m || i < 0 || j < 0 || k < 0 || l < 0)
    throw ValidationError("coordinate index out of range");

  auto christoffel_at = [&](const VectorX& v) {
    return make_jet(chart, v).Gamma;
  };

  // dGamma[p][c](a, b) = d Gamma^c_{ab} / du_p, for p in {i, j}.
  std::vector<std::vector<MatrixX>> dGamma(2);
  const int axes[2] = {i, j};
  for (int p = 0; p < 2; ++p) {
    const auto Gp = christoffel_at(shifted(u, axes[p], h));
    const auto Gm = christoffel_at(shifted(u, axes[p], -h));
    dGamma[p].reserve(m);
    for (int c = 0; c < m; ++c)
      dGamma[p].push_back((Gp[c] - Gm[c]) / (2.0 * h));
  }

  // R(d_i, d_j) d_l = Rup^c d_c.
  VectorX Rup(m);
  for (int c = 0; c < m; ++c) {
    Real val = dGamma[0][c](j, l) - dGamma[1][c](i, l);
    for (int q = 0; q < m; ++q)
      val += jet.Gamma[q](j, l) * jet.Gamma[c](i, q) -
             jet.Gamma[q](i, l) * jet.Gamma[c](j, q);
    Rup[c] = val;
  }
  // R(v, w, u, z) = <R(v, w) z, u>.
  Real intrinsic = 0.0;
  for (int c = 0; c < m; ++c) intrinsic += jet.g(k, c) * Rup[c];

  const Real extrinsic = jet.A_at(i, k).dot(jet.A_at(j, l)) -
                         jet.A_at(i, l).dot(jet.A_at(j, k));
  return std::abs(intrinsic - extrinsic);
}

Real codazzi_residual(const Chart& chart, const VectorX& u, int i, int j,
                      int k, Real h) {
  (void)h;
  require_margin(chart, u, chart.closed_form() ? 0.0 : 0.0);
  const Jet jet = make_jet(chart, u);
  const int m = jet.m;
  if (i >= m || j >= m || k >= m) throw ValidationError("index out of range");
  const auto npA = nabla_perp_A(chart, jet);
  auto slot = [m](int a, int b, int c) {
    return (static_cast<size_t>(a) * m + b) * m + c;
  };
  return (npA[slot(i, j, k)] - npA[slot(j, i, k)]).norm();
}

Real ricci_residual(const Chart& chart, const VectorX& u, int i, int j, int a,
                    Real h) {
  h = resolve_h(h);
  require_margin(chart, u, 2.0 * h);
  const Jet jet = make_jet(chart, u);
  const int m = jet.m;
  const int codim = jet.n - jet.m;
  if (a < 0 || a >= codim) throw ValidationError("normal index out of range");
  const auto center_frame = normal_frame(jet);

  // Smooth local extension of the center frame: project onto the normal
  // space at v and re-orthonormalize in order.
  auto frame_field = [&](const VectorX& v) {
    const Jet jv = make_jet(chart, v);
    std::vector<VectorX> out;
    out.reserve(center_frame.size());
    for (const auto& nu : center_frame) {
      VectorX w = jv.P_perp * nu;
      for (const auto& prev : out) w -= prev.dot(w) * prev;
      const Real norm = w.norm();
      if (norm < 1e-8)
        throw DegenerateImmersion("normal frame propagation degenerated");
      out.push_back(w / norm);
    }
    return out;
  };
  auto nu_at = [&](const VectorX& v) { return frame_field(v)[a]; };

  // w_dir(d, v) = nabla^perp_d nu at v.
  auto w_dir = [&](int d, const VectorX& v) {
    const Jet jv = make_jet(chart, v);
    const VectorX dnu =
        (nu_at(shifted(v, d, h)) - nu_at(shifted(v, d, -h))) / (2.0 * h);
    return VectorX(jv.P_perp * dnu);
  };

  const VectorX dji =
      (w_dir(j, shifted(u, i, h)) - w_dir(j, shifted(u, i, -h))) / (2.0 * h);
  const VectorX dij =
      (w_dir(i, shifted(u, j, h)) - w_dir(i, shifted(u, j, -h))) / (2.0 * h);
  const VectorX lhs = jet.P_perp * (dji - dij);

  MatrixX Anu(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) Anu(p, q) = jet.A_at(p, q).dot(center_frame[a]);
  VectorX rhs = VectorX::Zero(jet.n);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      rhs += jet.g_inv(p, q) *
             (Anu(j, p) * jet.A_at(q, i) - Anu(i, p) * jet.A_at(q, j));
  return (lhs - rhs).norm();
}

SimonsResult simons_residual(const Chart& chart, const VectorX& u, int i,
                             int j, Real h) {
  h = resolve_h(h);
  require_margin(chart, u, h);
  const Jet jet = make_jet(chart, u);
  const int m = jet.m;
  if (i >= m || j >= m) throw ValidationError("index out of range");
  auto slot = [m](int p, int q, int r) {
    return (static_cast<size_t>(p) * m + q) * m + r;
  };

  const auto npA = nabla_perp_A(chart, jet);
  const auto npH = nabla_perp_H_from(jet, npA);

  // nabla^perp A and nabla^perp H as fields at the stencil points.
  std::vector<std::vector<VectorX>> npA_p(m), npA_m(m);
  std::vector<std::vector<VectorX>> npH_p(m), npH_m(m);
  for (int p = 0; p < m; ++p) {
    const Jet jp = make_jet(chart, shifted(u, p, h));
    const Jet jm = make_jet(chart, shifted(u, p, -h));
    npA_p[p] = nabla_perp_A(chart, jp);
    npA_m[p] = nabla_perp_A(chart, jm);
    npH_p[p] = nabla_perp_H_from(jp, npA_p[p]);
    npH_m[p] = nabla_perp_H_from(jm, npA_m[p]);
  }

  // Delta^perp A(d_i, d_j) = g^{pq} (nabla^perp)^2_{p,q} A (d_i, d_j).
  VectorX deltaA = VectorX::Zero(jet.n);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      VectorX second =
          jet.P_perp *
          ((npA_p[p][slot(q, i, j)] - npA_m[p][slot(q, i, j)]) / (2.0 * h));
      for (int c = 0; c < m; ++c)
        second -= jet.Gamma[c](p, q) * npA[slot(c, i, j)] +
                  jet.Gamma[c](p, i) * npA[slot(q, c, j)] +
                  jet.Gamma[c](p, j) * npA[slot(q, i, c)];
      deltaA += jet.g_inv(p, q) * second;
    }

  // (nabla^perp)^2_{i,j} H.
  VectorX hessH =
      jet.P_perp * ((npH_p[i][static_cast<size_t>(j)] -
                     npH_m[i][static_cast<size_t>(j)]) /
                    (2.0 * h));
  for (int c = 0; c < m; ++c) hessH -= jet.Gamma[c](i, j) * npH[static_cast<size_t>(c)];

  // Cubic terms, orthonormal-frame sums written with g^{-1} contractions.
  MatrixX AH(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) AH(p, q) = jet.A_at(p, q).dot(jet.H);

  VectorX T1 = VectorX::Zero(jet.n), T2 = T1, T3 = T1, T4 = T1, T5 = T1;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      T1 += jet.g_inv(a, b) * AH(i, a) * jet.A_at(j, b);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
          const Real gab = jet.g_inv(a, b), gcd = jet.g_inv(c, d);
          T2 += 2.0 * gab * gcd * jet.A_at(i, a).dot(jet.A_at(j, c)) *
                jet.A_at(b, d);
          T3 -= jet.g_inv(a, c) * jet.g_inv(b, d) *
                jet.A_at(i, j).dot(jet.A_at(a, b)) * jet.A_at(c, d);
          T4 -= gab * gcd * jet.A_at(i, a).dot(jet.A_at(b, c)) * jet.A_at(d, j);
          T5 -= gab * gcd * jet.A_at(j, a).dot(jet.A_at(b, c)) * jet.A_at(d, i);
        }

  SimonsResult out;
  out.value = (deltaA - (hessH + T1 + T2 + T3 + T4 + T5)).norm();
  out.fd_mode_warning = !chart.closed_form();
  return out;
}

Real principal_normal_parallel_residual(const Chart& chart, const VectorX& u,
                                        Real h) {
  h = resolve_h(h);
  require_margin(chart, u, h);
  const Jet jet = make_jet(chart, u);
  if (jet.H.squaredNorm() <= kEpsH)
    throw ValidationError(
        "principal normal undefined: |H|^2 below threshold at u");

  auto xi_at = [&](const VectorX& v) {
    const Jet jv = make_jet(chart, v);
    const Real h2 = jv.H.squaredNorm();
    if (h2 <= kEpsH)
      throw ValidationError(
          "principal normal undefined: |H|^2 below threshold at an FD "
          "neighbor");
    return VectorX(jv.H / std::sqrt(h2));
  };

  const int m = jet.m;
  std::vector<VectorX> T(m);
  for (int d = 0; d < m; ++d) {
    const VectorX dxi =
        (xi_at(shifted(u, d, h)) - xi_at(shifted(u, d, -h))) / (2.0 * h);
    T[static_cast<size_t>(d)] = jet.P_perp * dxi;
  }
  MatrixX M(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      M(p, q) = T[static_cast<size_t>(p)].dot(T[static_cast<size_t>(q)]);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixX> solver(M, jet.g);
  return std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
}

}  // namespace mcf
