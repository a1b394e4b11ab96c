#ifndef MCF_CHART_HPP
#define MCF_CHART_HPP

#include <functional>
#include <string>
#include <vector>

#include "mcf/types.hpp"

namespace mcf {

// A parametrized immersion F: U subset R^m -> R^n over an axis-aligned
// box, with derivative oracles. When the closed-form oracles d1/d2/d3 are
// absent, centered finite differences of the position (step fd_step per
// axis) stand in for them; closed forms are preferred wherever they exist.
struct Chart {
  int dim_domain = 0;   // m
  int dim_ambient = 0;  // n
  VectorX lo, hi;       // parameter box
  Eigen::VectorXi grid; // default per-axis sample counts

  std::function<VectorX(const VectorX&)> position;
  std::function<VectorX(const VectorX&, int)> d1;
  std::function<VectorX(const VectorX&, int, int)> d2;
  std::function<VectorX(const VectorX&, int, int, int)> d3;

  VectorX fd_step;      // per-axis step for FD fallbacks and field derivatives
  Real rank_tol = 1e-8; // smallest singular value of dF must exceed this
  std::string name;
  int flat_dims = 0;    // trailing axes that are exact flat product factors

  bool closed_form() const { return static_cast<bool>(d3); }
};

// Default per-axis FD step: (box width) / (4 * samples).
VectorX default_fd_step(const VectorX& lo, const VectorX& hi,
                        const Eigen::VectorXi& grid);

// Throws StencilError unless u +- width*fd_step stays inside the box.
void require_stencil_margin(const Chart& chart, const VectorX& u, int width);

VectorX eval_position(const Chart& chart, const VectorX& u);
VectorX eval_d1(const Chart& chart, const VectorX& u, int i);
VectorX eval_d2(const Chart& chart, const VectorX& u, int i, int j);
VectorX eval_d3(const Chart& chart, const VectorX& u, int i, int j, int k);

// All pointwise first- and second-order geometry of the immersion at u.
// Index convention: 2-tensors with ambient values are stored flattened,
// entry (i, j) at i*m + j.
struct Jet {
  VectorX u;
  VectorX F;                  // position (n)
  MatrixX dF;                 // n x m
  std::vector<VectorX> d2F;   // m*m ambient vectors, symmetric
  MatrixX g, g_inv;           // m x m
  MatrixX P_perp;             // n x n projector onto the normal space
  std::vector<MatrixX> Gamma; // Gamma[k](i,j) = Christoffel symbol of g
  std::vector<VectorX> A;     // ambient A(d_i, d_j) = P_perp * d2F, m*m
  VectorX H;                  // mean curvature vector (n)
  VectorX t;                  // coordinates of grad s = F_top (m)
  VectorX F_top, F_perp;      // ambient decomposition of the position

  int m = 0, n = 0;
  Index at(int i, int j) const { return static_cast<Index>(i) * m + j; }
  const VectorX& A_at(int i, int j) const { return A[at(i, j)]; }
  Real s_value() const { return 0.5 * F.squaredNorm(); }
};

// Throws DegenerateImmersion when dF drops below full rank.
Jet make_jet(const Chart& chart, const VectorX& u);

// Orthonormal basis of the normal space: Gram-Schmidt applied to the
// ambient standard basis projected off span(dF), in index order, skipping
// directions whose residual norm falls below 1e-8. In the hypersurface
// case the normal is flipped so that <H, nu> >= 0 whenever |H|^2 > kEpsH.
std::vector<VectorX> normal_frame(const Jet& jet);

// First covariant derivative of the second fundamental form,
// (nabla^perp_i A)(d_j, d_k), flattened at (i*m + j)*m + k. Exact when the
// chart carries closed-form third derivatives, otherwise assembled from
// centered differences of the ambient A-field.
std::vector<VectorX> nabla_perp_A(const Chart& chart, const Jet& jet);

// nabla^perp_i H as the g-trace of nabla_perp_A over the last two slots.
// The same array backs every consumer so that trace identities hold to
// round-off on the computed numbers.
std::vector<VectorX> nabla_perp_H_from(const Jet& jet,
                                       const std::vector<VectorX>& npA);

// g-orthonormal tangent basis (columns), from the Cholesky factor of g.
MatrixX g_orthonormal_basis(const MatrixX& g);

}  // namespace mcf

#endif  // MCF_CHART_HPP
