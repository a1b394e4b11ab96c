#ifndef MCF_STRUCTURE_RESIDUALS_HPP
#define MCF_STRUCTURE_RESIDUALS_HPP

#include "mcf/chart.hpp"

namespace mcf {

// Residuals of the structure equations of an immersion, evaluated
// pointwise: each compares an intrinsically differentiated left side
// against the algebraic curvature terms on the right, so the residual
// measures FD truncation plus any modeling error. The optional step h is
// the absolute FD step for field derivatives (0 picks the default 1e-3,
// suited to the O(1) parameter boxes of the bundled charts).

// Residual norms of the position identities: (grad_s) the embedded FD
// gradient of s = |F|^2/2 against F_top, (hessian_s) the covariant Hessian
// of s against g + <F, A>, (normal_derivative) nabla^perp_v F_perp against
// -A(grad s, v).
struct PositionResiduals {
  Real grad_s = 0.0;
  Real hessian_s = 0.0;
  Real normal_derivative = 0.0;
  Real max() const {
    return std::max(grad_s, std::max(hessian_s, normal_derivative));
  }
};
PositionResiduals position_identity_residual(const Chart& chart,
                                             const VectorX& u, Real h = 0.0);

// |R(d_i, d_j, d_k, d_l) - (<A(d_i,d_k), A(d_j,d_l)> - <A(d_i,d_l), A(d_j,d_k)>)|
// with the intrinsic tensor assembled from centered differences of the
// Christoffel symbols.
Real gauss_residual(const Chart& chart, const VectorX& u, int i, int j, int k,
                    int l, Real h = 0.0);

// |nabla^perp_i A(d_j, d_k) - nabla^perp_j A(d_i, d_k)|. Vacuous (exactly
// zero) for one-dimensional domains.
Real codazzi_residual(const Chart& chart, const VectorX& u, int i, int j,
                      int k, Real h = 0.0);

// |R^perp(d_i, d_j) nu_a - sum_k (A^nu(d_j,e_k) A(d_i,e_k) -
//  A^nu(d_i,e_k) A(d_j,e_k))| with the normal curvature from nested
// centered differences of a smooth local frame field (the frame at u
// projected onto nearby normal spaces).
Real ricci_residual(const Chart& chart, const VectorX& u, int i, int j, int a,
                    Real h = 0.0);

struct SimonsResult {
  Real value = 0.0;
  // Set when the chart lacks closed-form derivatives: the fourth-order
  // information then comes from nested FD and loses accuracy.
  bool fd_mode_warning = false;
};

// Norm of Delta^perp A(d_i, d_j) minus the elliptic identity's right side
// (Hessian of H plus the four cubic curvature terms).
SimonsResult simons_residual(const Chart& chart, const VectorX& u, int i,
                             int j, Real h = 0.0);

// Estimate of max over g-unit v of |nabla^perp_v xi| for xi = H/|H|.
// Throws ValidationError when |H|^2 <= kEpsH at u or an FD neighbor.
Real principal_normal_parallel_residual(const Chart& chart, const VectorX& u,
                                        Real h = 0.0);

}  // namespace mcf

#endif  // MCF_STRUCTURE_RESIDUALS_HPP
