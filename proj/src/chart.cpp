#include "mcf/chart.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace mcf {

VectorX default_fd_step(const VectorX& lo, const VectorX& hi,
                        const Eigen::VectorXi& grid) {
  VectorX h(lo.size());
  for (Index i = 0; i < lo.size(); ++i)
    h[i] = (hi[i] - lo[i]) / (4.0 * std::max(grid[i], 2));
  return h;
}

void require_stencil_margin(const Chart& chart, const VectorX& u, int width) {
  for (int i = 0; i < chart.dim_domain; ++i) {
    const Real margin = width * chart.fd_step[i];
    if (u[i] - margin < chart.lo[i] || u[i] + margin > chart.hi[i])
      throw StencilError("evaluation point too close to the domain boundary "
                         "for the FD stencil (axis " +
                         std::to_string(i) + ")");
  }
}

VectorX eval_position(const Chart& chart, const VectorX& u) {
  return chart.position(u);
}

VectorX eval_d1(const Chart& chart, const VectorX& u, int i) {
  if (chart.d1) return chart.d1(u, i);
  VectorX up = u, um = u;
  const Real h = chart.fd_step[i];
  up[i] += h;
  um[i] -= h;
  return (chart.position(up) - chart.position(um)) / (2.0 * h);
}

VectorX eval_d2(const Chart& chart, const VectorX& u, int i, int j) {
  if (chart.d2) return chart.d2(u, i, j);
  if (chart.d1) {
    VectorX up = u, um = u;
    const Real h = chart.fd_step[j];
    up[j] += h;
    um[j] -= h;
    return (chart.d1(up, i) - chart.d1(um, i)) / (2.0 * h);
  }
  const Real hi = chart.fd_step[i];
  if (i == j) {
    VectorX up = u, um = u;
    up[i] += hi;
    um[i] -= hi;
    return (chart.position(up) - 2.0 * chart.position(u) +
            chart.position(um)) /
           (hi * hi);
  }
  const Real hj = chart.fd_step[j];
  VectorX upp = u, upm = u, ump = u, umm = u;
  upp[i] += hi; upp[j] += hj;
  upm[i] += hi; upm[j] -= hj;
  ump[i] -= hi; ump[j] += hj;
  umm[i] -= hi; umm[j] -= hj;
  return (chart.position(upp) - chart.position(upm) - chart.position(ump) +
          chart.position(umm)) /
         (4.0 * hi * hj);
}

VectorX eval_d3(const Chart& chart, const VectorX& u, int i, int j, int k) {
  if (chart.d3) return chart.d3(u, i, j, k);
  VectorX up = u, um = u;
  const Real h = chart.fd_step[i];
  up[i] += h;
  um[i] -= h;
  return (eval_d2(chart, up, j, k) - eval_d2(chart, um, j, k)) / (2.0 * h);
}

Jet make_jet(const Chart& chart, const VectorX& u) {
  if (!chart.d2) require_stencil_margin(chart, u, chart.d1 ? 1 : 2);
  Jet jet;
  jet.m = chart.dim_domain;
  jet.n = chart.dim_ambient;
  jet.u = u;
  jet.F = chart.position(u);

  jet.dF.resize(jet.n, jet.m);
  for (int i = 0; i < jet.m; ++i) jet.dF.col(i) = eval_d1(chart, u, i);

  Eigen::JacobiSVD<MatrixX> svd(jet.dF);
  if (svd.singularValues().minCoeff() <= chart.rank_tol)
    throw DegenerateImmersion("dF is rank deficient at the evaluation point "
                              "(smallest singular value below rank_tol)");

  jet.g = jet.dF.transpose() * jet.dF;
  jet.g_inv = jet.g.inverse();
  jet.P_perp = MatrixX::Identity(jet.n, jet.n) -
               jet.dF * jet.g_inv * jet.dF.transpose();

  jet.d2F.resize(static_cast<size_t>(jet.m) * jet.m);
  for (int i = 0; i < jet.m; ++i)
    for (int j = i; j < jet.m; ++j) {
      VectorX v = eval_d2(chart, u, i, j);
      jet.d2F[jet.at(i, j)] = v;
      if (i != j) jet.d2F[jet.at(j, i)] = v;
    }

  // dg[k](i,j) = <d2F(k,i), dF_j> + <dF_i, d2F(k,j)>
  std::vector<MatrixX> dg(jet.m, MatrixX(jet.m, jet.m));
  for (int k = 0; k < jet.m; ++k)
    for (int i = 0; i < jet.m; ++i)
      for (int j = 0; j < jet.m; ++j)
        dg[k](i, j) = jet.d2F[jet.at(k, i)].dot(jet.dF.col(j)) +
                      jet.dF.col(i).dot(jet.d2F[jet.at(k, j)]);

  jet.Gamma.assign(jet.m, MatrixX::Zero(jet.m, jet.m));
  for (int k = 0; k < jet.m; ++k)
    for (int i = 0; i < jet.m; ++i)
      for (int j = 0; j < jet.m; ++j) {
        Real acc = 0.0;
        for (int l = 0; l < jet.m; ++l)
          acc += jet.g_inv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        jet.Gamma[k](i, j) = 0.5 * acc;
      }

  jet.A.resize(jet.d2F.size());
  for (size_t idx = 0; idx < jet.d2F.size(); ++idx)
    jet.A[idx] = jet.P_perp * jet.d2F[idx];

  jet.H = VectorX::Zero(jet.n);
  for (int i = 0; i < jet.m; ++i)
    for (int j = 0; j < jet.m; ++j) jet.H += jet.g_inv(i, j) * jet.A_at(i, j);

  jet.t.resize(jet.m);
  VectorX Fd(jet.m);
  for (int j = 0; j < jet.m; ++j) Fd[j] = jet.F.dot(jet.dF.col(j));
  jet.t = jet.g_inv * Fd;
  jet.F_top = jet.dF * jet.t;
  jet.F_perp = jet.F - jet.F_top;
  return jet;
}

std::vector<VectorX> normal_frame(const Jet& jet) {
  std::vector<VectorX> frame;
  const int codim = jet.n - jet.m;
  frame.reserve(codim);
  Eigen::HouseholderQR<MatrixX> qr(jet.dF);
  MatrixX Q = qr.householderQ() * MatrixX::Identity(jet.n, jet.m);
  for (int a = 0; a < jet.n && static_cast<int>(frame.size()) < codim; ++a) {
    VectorX w = VectorX::Zero(jet.n);
    w[a] = 1.0;
    w -= Q * (Q.transpose() * w);
    for (const auto& nu : frame) w -= nu.dot(w) * nu;
    const Real norm = w.norm();
    if (norm > 1e-8) frame.push_back(w / norm);
  }
  if (static_cast<int>(frame.size()) != codim)
    throw DegenerateImmersion(
        "could not complete the normal frame by Gram-Schmidt");
  if (codim == 1 && jet.H.squaredNorm() > kEpsH && jet.H.dot(frame[0]) < 0.0)
    frame[0] = -frame[0];
  return frame;
}

namespace {

// A(d_j, d_k) as an ambient-vector field, for FD of the field in u.
std::vector<VectorX> ambient_A_field(const Chart& chart, const VectorX& u) {
  const int m = chart.dim_domain;
  const int n = chart.dim_ambient;
  MatrixX dF(n, m);
  for (int i = 0; i < m; ++i) dF.col(i) = eval_d1(chart, u, i);
  const MatrixX g = dF.transpose() * dF;
  const MatrixX P_perp =
      MatrixX::Identity(n, n) - dF * g.inverse() * dF.transpose();
  std::vector<VectorX> A(static_cast<size_t>(m) * m);
  for (int j = 0; j < m; ++j)
    for (int k = j; k < m; ++k) {
      VectorX v = P_perp * eval_d2(chart, u, j, k);
      A[static_cast<size_t>(j) * m + k] = v;
      if (j != k) A[static_cast<size_t>(k) * m + j] = v;
    }
  return A;
}

}  // namespace

std::vector<VectorX> nabla_perp_A(const Chart& chart, const Jet& jet) {
  const int m = jet.m;
  std::vector<VectorX> out(static_cast<size_t>(m) * m * m);
  auto slot = [m](int i, int j, int k) {
    return (static_cast<size_t>(i) * m + j) * m + k;
  };

  if (chart.closed_form()) {
    // dA(j,k)/du_i = (d_i P_perp) d2F(j,k) + P_perp d3F(i,j,k), with
    // d_i P_perp = -(B_i G dF^T + dF dG_i dF^T + dF G B_i^T),
    // B_i = d_i dF and dG_i = d(g^{-1})/du_i = -G (d_i g) G.
    std::vector<MatrixX> dP(m);
    for (int i = 0; i < m; ++i) {
      MatrixX B(jet.n, m);
      for (int j = 0; j < m; ++j) B.col(j) = jet.d2F[jet.at(i, j)];
      const MatrixX dgi = B.transpose() * jet.dF + jet.dF.transpose() * B;
      const MatrixX dGi = -jet.g_inv * dgi * jet.g_inv;
      dP[i] = -(B * jet.g_inv * jet.dF.transpose() +
                jet.dF * dGi * jet.dF.transpose() +
                jet.dF * jet.g_inv * B.transpose());
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = j; k < m; ++k) {
          VectorX dA = dP[i] * jet.d2F[jet.at(j, k)] +
                       jet.P_perp * eval_d3(chart, jet.u, i, j, k);
          VectorX v = jet.P_perp * dA;
          for (int p = 0; p < m; ++p)
            v -= jet.Gamma[p](i, j) * jet.A_at(p, k) +
                 jet.Gamma[p](i, k) * jet.A_at(j, p);
          out[slot(i, j, k)] = v;
          if (j != k) out[slot(i, k, j)] = v;
        }
    return out;
  }

  for (int i = 0; i < m; ++i) {
    VectorX up = jet.u, um = jet.u;
    const Real h = chart.fd_step[i];
    up[i] += h;
    um[i] -= h;
    const auto Ap = ambient_A_field(chart, up);
    const auto Am = ambient_A_field(chart, um);
    for (int j = 0; j < m; ++j)
      for (int k = j; k < m; ++k) {
        const size_t jk = static_cast<size_t>(j) * m + k;
        VectorX v = jet.P_perp * ((Ap[jk] - Am[jk]) / (2.0 * h));
        for (int p = 0; p < m; ++p)
          v -= jet.Gamma[p](i, j) * jet.A_at(p, k) +
               jet.Gamma[p](i, k) * jet.A_at(j, p);
        out[slot(i, j, k)] = v;
        if (j != k) out[slot(i, k, j)] = v;
      }
  }
  return out;
}

std::vector<VectorX> nabla_perp_H_from(const Jet& jet,
                                       const std::vector<VectorX>& npA) {
  const int m = jet.m;
  std::vector<VectorX> out(m, VectorX::Zero(jet.n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        out[i] += jet.g_inv(j, k) * npA[(static_cast<size_t>(i) * m + j) * m + k];
  return out;
}

MatrixX g_orthonormal_basis(const MatrixX& g) {
  Eigen::LLT<MatrixX> llt(g);
  return llt.matrixL().toDenseMatrix().transpose().inverse();
}

}  // namespace mcf
