#include "mcf/fundamental_forms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace mcf {

FundamentalForms fundamental_forms(const Jet& jet) {
  FundamentalForms f;
  f.m = jet.m;
  f.n = jet.n;
  f.g = jet.g;
  f.g_inv = jet.g_inv;
  f.P_perp = jet.P_perp;
  f.normal_frame = normal_frame(jet);
  f.A_ambient = jet.A;
  f.A_frame.reserve(f.normal_frame.size());
  for (const auto& nu : f.normal_frame) {
    MatrixX Anu(f.m, f.m);
    for (int i = 0; i < f.m; ++i)
      for (int j = 0; j < f.m; ++j) Anu(i, j) = jet.A_at(i, j).dot(nu);
    f.A_frame.push_back(std::move(Anu));
  }
  f.H = jet.H;
  f.F_top = jet.F_top;
  f.F_perp = jet.F_perp;
  f.F_top_coords = jet.t;
  return f;
}

FundamentalForms fundamental_forms(const Chart& chart, const VectorX& u) {
  return fundamental_forms(make_jet(chart, u));
}

Real norm_A2(const FundamentalForms& f) {
  Real acc = 0.0;
  for (const auto& Anu : f.A_frame)
    acc += (f.g_inv * Anu * f.g_inv * Anu).trace();
  return acc;
}

Real norm_H2(const FundamentalForms& f) { return f.H.squaredNorm(); }

MatrixX second_form_along(const FundamentalForms& f, const VectorX& xi) {
  MatrixX Axi(f.m, f.m);
  for (int i = 0; i < f.m; ++i)
    for (int j = 0; j < f.m; ++j) Axi(i, j) = f.A_at(i, j).dot(xi);
  return Axi;
}

MatrixX a_h(const FundamentalForms& f) { return second_form_along(f, f.H); }

Real norm_AH2(const FundamentalForms& f) {
  const MatrixX AH = a_h(f);
  return (f.g_inv * AH * f.g_inv * AH).trace();
}

VectorX principal_curvatures(const FundamentalForms& f) {
  if (f.n - f.m != 1)
    throw ValidationError(
        "principal curvatures are only defined for hypersurfaces");
  return eigen_shape(f, f.normal_frame[0]).eigenvalues;
}

ShapeEigen eigen_shape(const FundamentalForms& f, const VectorX& xi) {
  if (std::abs(xi.norm() - 1.0) > 1e-8)
    throw ValidationError("xi must be a unit vector");
  if ((xi - f.P_perp * xi).norm() > 1e-6)
    throw ValidationError("xi must be normal to the immersion");
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixX> solver(
      second_form_along(f, xi), f.g);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

BilinearForm circ_star(const BilinearForm& C, const BilinearForm& D,
                       const MatrixX& g_inv) {
  if (C.comps.empty() || D.comps.empty())
    throw ValidationError("circ_star needs nonempty forms");
  const Index m = g_inv.rows();
  for (const auto& M : C.comps)
    if (M.rows() != m || M.cols() != m)
      throw ValidationError("circ_star: dimension mismatch");
  for (const auto& M : D.comps)
    if (M.rows() != m || M.cols() != m)
      throw ValidationError("circ_star: dimension mismatch");
  BilinearForm out;
  out.comps.reserve(C.comps.size() * D.comps.size());
  for (const auto& Ca : C.comps)
    for (const auto& Db : D.comps) out.comps.push_back(Ca * g_inv * Db);
  return out;
}

Real bilinear_norm2(const BilinearForm& B, const MatrixX& g_inv) {
  Real acc = 0.0;
  for (const auto& M : B.comps)
    acc += (g_inv * M * g_inv * M.transpose()).trace();
  return acc;
}

VectorX bilinear_apply(const BilinearForm& B, const VectorX& v,
                       const VectorX& w) {
  VectorX out(static_cast<Index>(B.comps.size()));
  for (size_t c = 0; c < B.comps.size(); ++c)
    out[static_cast<Index>(c)] = v.dot(B.comps[c] * w);
  return out;
}

SpectrumCheck lemma_bound_check(const VectorX& spectrum) {
  if (spectrum.size() < 2)
    throw ValidationError("lemma_bound_check needs m >= 2");
  SpectrumCheck out;
  out.H = spectrum.sum();
  out.S = out.H * out.H - spectrum.squaredNorm();
  out.mean_convex = out.H > 0.0;
  out.positive_S = out.S > 0.0;
  out.bound_holds = (spectrum.array() < out.H).all();

  std::vector<Real> sorted(spectrum.data(), spectrum.data() + spectrum.size());
  std::sort(sorted.begin(), sorted.end());
  Real prefix = 0.0;
  for (size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    if (prefix > 0.0) {
      out.k_convexity = static_cast<int>(k) + 1;
      break;
    }
  }
  return out;
}

}  // namespace mcf
