#ifndef MCF_EXPANDER_VERIFY_HPP
#define MCF_EXPANDER_VERIFY_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mcf/fundamental_forms.hpp"
#include "mcf/grid.hpp"

namespace mcf {

// A chart proposed as a solution of H = lambda * F_perp. Nothing is assumed:
// the point of the module is to measure how far the chart is from the
// constraint and, on candidates that pass the gate, how well the derived
// elliptic identities hold.
struct ExpanderCandidate {
  Chart chart;
  Real lambda = 1.0;
};

struct ArgMaxReal {
  Real value = 0.0;
  VectorX at;
  void consider(Real v, const VectorX& u) {
    if (v > value || at.size() == 0) {
      value = v;
      at = u;
    }
  }
};

struct VerifyOptions {
  Eigen::VectorXi grid;        // override; empty uses the chart default
  Real gate = 1e-4;            // expander residual admitting identity checks
  Real parallel_xi_tol = 1e-4; // precondition for the A^H pinching identity
  int threads = 0;
};

// max over the grid of |H - lambda * F_perp|.
ArgMaxReal expander_residual(const ExpanderCandidate& cand,
                             const Eigen::VectorXi& grid = {});

// Residuals of the self-expander identities, max over interior grid points.
// All scalar Laplacians/gradients use the induced metric via grid FD; the
// drift direction grad s = F_top comes from the position split, not FD.
struct ResidualMap {
  ArgMaxReal expander;
  ArgMaxReal self2;    // nabla^perp_v H + lambda A(grad s, v)
  ArgMaxReal self4;    // traced Hessian identity for H
  ArgMaxReal self5;    // |H|^2 identity with |A^H|^2
  ArgMaxReal self5h;   // hypersurface form with |A|^2 |H|^2
  ArgMaxReal self6h;   // tensor identity for A (hypersurface)
  ArgMaxReal self6hb;  // |A|^2 identity (hypersurface)
  ArgMaxReal eq_ah;    // drift-elliptic identity for |A^H|^2/|H|^4
  bool hypersurface = false;
  long evaluated = 0;
  long pinching_undefined = 0;  // interior points under the |H|^2 threshold
  // Property bookkeeping, reported for transparency:
  Real self4_trace_gap = 0.0;     // |direct - trace-of-self3 route|
  Real self5_vs_5h_gap = 0.0;     // hypersurfaces: the two routes pointwise
  Real parallel_xi_residual = 0.0;
  Real flat_direction_residual = 0.0;  // product charts only
};
ResidualMap pde_residuals(const ExpanderCandidate& cand,
                          const VerifyOptions& opts = {});

struct QSquaredResult {
  Real value = 0.0;  // clamped at zero
  Real raw = 0.0;    // before clamping; tiny negatives are round-off
};

// Q^2 = |nabla A|^2 |H|^2 + |A|^2 |nabla H|^2 - <grad|A|^2, grad|H|^2>/2,
// each ingredient by FD at step h (0 = default 1e-3). Hypersurfaces only.
QSquaredResult q_squared(const ExpanderCandidate& cand, const VectorX& u,
                         Real h = 0.0);

// sup of the pinching ratio over grid points with |F| > radius
// (|A|^2/|H|^2 on hypersurfaces, |A^H|^2/|H|^4 otherwise). Throws
// ValidationError when no grid point lies outside the radius.
Real pinching_sup_outside(const ExpanderCandidate& cand, Real radius,
                          const Eigen::VectorXi& grid = {});

// (radius, sup) pairs over an increasing radius ladder; nonincreasing by
// construction since larger radii take the sup over subsets.
std::vector<std::pair<Real, Real>> pinching_mu_ladder(
    const ExpanderCandidate& cand, const std::vector<Real>& radii,
    const Eigen::VectorXi& grid = {});

struct RigidityReport {
  Real gate_residual = 0.0;
  bool gate_passed = false;
  bool hypersurface = false;
  Real pinch_min = 0.0, pinch_max = 0.0;
  long pinching_undefined = 0;
  // "constant" when max-min < tol, else "interior_max" when some interior
  // grid point strictly dominates its full 1-ring by more than tol,
  // else "no_interior_max". A finite grid cannot certify the dichotomy, so
  // these are consistency verdicts, not proofs.
  std::string max_verdict;
  Real constancy_tol = 1e-8;
  int eig_nonzero_min = 0, eig_nonzero_max = 0;  // |eig| > 1e-6 counts of A^H
  Real eig_top_vs_H2 = 0.0;  // max |top eigenvalue - |H|^2|
  Real parallel_xi_residual = 0.0;
  std::vector<std::pair<Real, Real>> mu_ladder;
  std::string hint;  // "consistent with product Gamma x R^(m-1)" or ""
};
RigidityReport rigidity_report(const ExpanderCandidate& cand,
                               const VerifyOptions& opts = {});

nlohmann::ordered_json residual_map_json(const ResidualMap& rm);
nlohmann::ordered_json rigidity_json(const RigidityReport& rr);

}  // namespace mcf

#endif  // MCF_EXPANDER_VERIFY_HPP
