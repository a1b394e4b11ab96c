#ifndef MCF_FUNDAMENTAL_FORMS_HPP
#define MCF_FUNDAMENTAL_FORMS_HPP

#include <limits>
#include <vector>

#include "mcf/chart.hpp"

namespace mcf {

// Pointwise first and second fundamental data of an immersion: the induced
// metric, an orthonormal normal frame, the normal-valued second fundamental
// form (both ambient-valued and as scalar forms A^{nu_a} in the frame), the
// mean curvature vector H = trace_g A (sum convention, no 1/m), and the
// tangent/normal split of the position.
struct FundamentalForms {
  int m = 0, n = 0;
  MatrixX g, g_inv;
  MatrixX P_perp;
  std::vector<VectorX> normal_frame;   // n - m orthonormal vectors
  std::vector<VectorX> A_ambient;      // m*m ambient vectors, (i,j) at i*m+j
  std::vector<MatrixX> A_frame;        // per normal direction, m x m
  VectorX H;
  VectorX F_top, F_perp;
  VectorX F_top_coords;                // coordinates of grad s

  const VectorX& A_at(int i, int j) const {
    return A_ambient[static_cast<size_t>(i) * m + j];
  }
};

FundamentalForms fundamental_forms(const Chart& chart, const VectorX& u);
FundamentalForms fundamental_forms(const Jet& jet);

// |A|^2 = sum_a tr(g^-1 A^a g^-1 A^a), |H|^2, A^H = <A, H>, |A^H|^2.
Real norm_A2(const FundamentalForms& f);
Real norm_H2(const FundamentalForms& f);
MatrixX second_form_along(const FundamentalForms& f, const VectorX& xi);
MatrixX a_h(const FundamentalForms& f);
Real norm_AH2(const FundamentalForms& f);

// Principal curvatures of a hypersurface with respect to the stored
// (H-oriented) unit normal, ascending.
VectorX principal_curvatures(const FundamentalForms& f);

struct ShapeEigen {
  VectorX eigenvalues;   // ascending
  MatrixX eigenvectors;  // columns, g-orthonormal
};

// Eigen-decomposition of the shape operator g^-1 A^xi for a unit normal xi.
ShapeEigen eigen_shape(const FundamentalForms& f, const VectorX& xi);

// A symmetric bilinear form on the tangent space with values in a
// d-dimensional inner-product space, stored as d coefficient matrices in an
// orthonormal basis of the value space.
struct BilinearForm {
  std::vector<MatrixX> comps;
  int value_dim() const { return static_cast<int>(comps.size()); }
};

// (C (*) D)(v, w) = sum_k C(v, e_k) (x) D(e_k, w) over a g-orthonormal
// frame; in coordinates component (a, b) of the result is C_a g^-1 D_b.
// Values live in the tensor product of the two value spaces, component
// (a, b) stored at a * dim(D) + b.
BilinearForm circ_star(const BilinearForm& C, const BilinearForm& D,
                       const MatrixX& g_inv);

// Full g-contraction |B|^2 over both tangent slots and the value space.
Real bilinear_norm2(const BilinearForm& B, const MatrixX& g_inv);

// Value-space vector B(v, w).
VectorX bilinear_apply(const BilinearForm& B, const VectorX& v,
                       const VectorX& w);

inline constexpr int kNotKConvex = std::numeric_limits<int>::max();

struct SpectrumCheck {
  Real H = 0.0;          // sum of the principal curvatures
  Real S = 0.0;          // scalar curvature |H|^2 - |A|^2
  bool mean_convex = false;
  bool positive_S = false;
  bool bound_holds = false;  // lambda_i < H for every i
  int k_convexity = kNotKConvex;  // smallest k with all k-sums positive
};

// Pure spectrum arithmetic for the mean-convex / positive-scalar-curvature
// bound lambda_i < |H| and the k-convexity degree. A sum of k entries is
// positive for every k-subset iff the sum of the k smallest is, so the scan
// uses sorted prefix sums; tests confirm against brute-force enumeration.
SpectrumCheck lemma_bound_check(const VectorX& spectrum);

}  // namespace mcf

#endif  // MCF_FUNDAMENTAL_FORMS_HPP
