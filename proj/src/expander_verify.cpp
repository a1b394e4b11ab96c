#include "mcf/expander_verify.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "mcf/parallel.hpp"
#include "mcf/structure_residuals.hpp"

namespace mcf {

namespace {

struct NodeGeom {
  Jet jet;
  std::vector<VectorX> npA;  // (nabla^perp_i A)(d_j, d_k), m^3 ambient vectors
  std::vector<VectorX> npH;  // g-trace of npA over the last two slots
  MatrixX AH;
  Real normH2 = 0.0, normA2 = 0.0, normAH2 = 0.0, absH = 0.0;
  bool pinch_ok = false;
  Real ratio_ah = 0.0;  // |A^H|^2/|H|^4 where defined
};

struct NodeGrid {
  GridSpec grid;
  VectorX h;
  std::vector<NodeGeom> nodes;
  int m = 0, n = 0;

  const NodeGeom& at(long flat) const {
    return nodes[static_cast<size_t>(flat)];
  }
};

NodeGrid build_grid(const ExpanderCandidate& cand, const Eigen::VectorXi& dims,
                    int threads, bool with_derivatives) {
  NodeGrid ng;
  ng.grid = chart_grid(cand.chart, dims);
  ng.h = ng.grid.spacing();
  ng.m = cand.chart.dim_domain;
  ng.n = cand.chart.dim_ambient;
  const long total = ng.grid.total();
  ng.nodes.resize(static_cast<size_t>(total));
  parallel_for(total, threads, [&](long flat) {
    NodeGeom& node = ng.nodes[static_cast<size_t>(flat)];
    const VectorX u = ng.grid.point(ng.grid.multi(flat));
    node.jet = make_jet(cand.chart, u);
    const Jet& jet = node.jet;
    if (with_derivatives) {
      node.npA = nabla_perp_A(cand.chart, jet);
      node.npH = nabla_perp_H_from(jet, node.npA);
    }
    node.normH2 = jet.H.squaredNorm();
    node.absH = std::sqrt(node.normH2);
    node.AH.resize(ng.m, ng.m);
    for (int i = 0; i < ng.m; ++i)
      for (int j = 0; j < ng.m; ++j) node.AH(i, j) = jet.A_at(i, j).dot(jet.H);
    node.normA2 = 0.0;
    for (int i = 0; i < ng.m; ++i)
      for (int j = 0; j < ng.m; ++j)
        for (int k = 0; k < ng.m; ++k)
          for (int l = 0; l < ng.m; ++l)
            node.normA2 += jet.g_inv(i, k) * jet.g_inv(j, l) *
                           jet.A_at(i, j).dot(jet.A_at(k, l));
    node.normAH2 = (jet.g_inv * node.AH * jet.g_inv * node.AH).trace();
    node.pinch_ok = node.normH2 > kEpsH;
    if (node.pinch_ok)
      node.ratio_ah = node.normAH2 / (node.normH2 * node.normH2);
  });
  return ng;
}

// Centered grid differences of scalar node fields.
template <typename F>
Real d1_field(const NodeGrid& ng, const F& f, long flat, int axis) {
  return (f(ng.grid.neighbor(flat, axis, 1)) -
          f(ng.grid.neighbor(flat, axis, -1))) /
         (2.0 * ng.h[axis]);
}

template <typename F>
Real d2_field(const NodeGrid& ng, const F& f, long flat, int a, int b) {
  if (a == b)
    return (f(ng.grid.neighbor(flat, a, 1)) - 2.0 * f(flat) +
            f(ng.grid.neighbor(flat, a, -1))) /
           (ng.h[a] * ng.h[a]);
  const long pp = ng.grid.neighbor(ng.grid.neighbor(flat, a, 1), b, 1);
  const long pm = ng.grid.neighbor(ng.grid.neighbor(flat, a, 1), b, -1);
  const long mp = ng.grid.neighbor(ng.grid.neighbor(flat, a, -1), b, 1);
  const long mm = ng.grid.neighbor(ng.grid.neighbor(flat, a, -1), b, -1);
  return (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * ng.h[a] * ng.h[b]);
}

// Laplace-Beltrami of a scalar node field at an interior node.
template <typename F>
Real laplace_beltrami(const NodeGrid& ng, const F& f, long flat) {
  const Jet& jet = ng.at(flat).jet;
  const int m = ng.m;
  VectorX df(m);
  for (int c = 0; c < m; ++c) df[c] = d1_field(ng, f, flat, c);
  Real acc = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Real hess = d2_field(ng, f, flat, a, b);
      for (int c = 0; c < m; ++c) hess -= jet.Gamma[c](a, b) * df[c];
      acc += jet.g_inv(a, b) * hess;
    }
  return acc;
}

// sup over g-unit v of |v^i M_i| for ambient vectors M_i.
Real frame_sup_norm(const MatrixX& g, const std::vector<VectorX>& M) {
  const int m = static_cast<int>(M.size());
  MatrixX G(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      G(p, q) = M[static_cast<size_t>(p)].dot(M[static_cast<size_t>(q)]);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixX> solver(G, g);
  return std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
}

// Full g-contraction norm of an ambient-valued 2-tensor (entries at p*m+q).
Real tensor2_norm(const Jet& jet, const std::vector<VectorX>& T) {
  const int m = jet.m;
  Real acc = 0.0;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          acc += jet.g_inv(p, a) * jet.g_inv(q, b) *
                 T[static_cast<size_t>(p) * m + q].dot(
                     T[static_cast<size_t>(a) * m + b]);
  return std::sqrt(std::max(acc, 0.0));
}

// Worst principal-normal parallelism residual over a spread of interior
// nodes with defined principal normal (roughly 16, stepping over eligible
// nodes rather than flat indices so thin axes are not skipped).
Real sampled_parallel_xi(const Chart& chart, const NodeGrid& ng) {
  std::vector<long> eligible;
  for (long flat = 0; flat < ng.grid.total(); ++flat) {
    if (!ng.grid.interior(ng.grid.multi(flat), 1)) continue;
    if (!ng.at(flat).pinch_ok) continue;
    eligible.push_back(flat);
  }
  if (eligible.empty()) return 0.0;
  const size_t stride = std::max<size_t>(1, eligible.size() / 16);
  Real worst = 0.0;
  for (size_t i = 0; i < eligible.size(); i += stride) {
    try {
      worst = std::max(worst, principal_normal_parallel_residual(
                                  chart, ng.at(eligible[i]).jet.u));
    } catch (const ValidationError&) {
    } catch (const StencilError&) {
    }
  }
  return worst;
}

bool neighbors_pinch_ok(const NodeGrid& ng, long flat) {
  // Full 1-ring (Moore neighborhood) including the node itself.
  const auto idx = ng.grid.multi(flat);
  const int m = ng.m;
  std::vector<int> off(static_cast<size_t>(m), -1);
  for (;;) {
    auto probe = idx;
    for (int i = 0; i < m; ++i) probe[static_cast<size_t>(i)] += off[static_cast<size_t>(i)];
    if (!ng.at(ng.grid.flat(probe)).pinch_ok) return false;
    int axis = m - 1;
    while (axis >= 0 && off[static_cast<size_t>(axis)] == 1) {
      off[static_cast<size_t>(axis)] = -1;
      --axis;
    }
    if (axis < 0) break;
    ++off[static_cast<size_t>(axis)];
  }
  return true;
}

}  // namespace

ArgMaxReal expander_residual(const ExpanderCandidate& cand,
                             const Eigen::VectorXi& grid) {
  const GridSpec gs = chart_grid(cand.chart, grid);
  ArgMaxReal out;
  for (long flat = 0; flat < gs.total(); ++flat) {
    const VectorX u = gs.point(gs.multi(flat));
    const Jet jet = make_jet(cand.chart, u);
    out.consider((jet.H - cand.lambda * jet.F_perp).norm(), u);
  }
  return out;
}

ResidualMap pde_residuals(const ExpanderCandidate& cand,
                          const VerifyOptions& opts) {
  const int threads = resolve_threads(opts.threads);
  const NodeGrid ng = build_grid(cand, opts.grid, threads, true);
  const int m = ng.m;
  const Real lambda = cand.lambda;

  ResidualMap rm;
  rm.hypersurface = (ng.n - ng.m == 1);

  for (long flat = 0; flat < ng.grid.total(); ++flat) {
    const NodeGeom& node = ng.at(flat);
    rm.expander.consider((node.jet.H - lambda * node.jet.F_perp).norm(),
                         node.jet.u);
  }
  if (rm.expander.value > opts.gate)
    throw GateRefusal("expander residual " + std::to_string(rm.expander.value) +
                          " exceeds the identity gate " +
                          std::to_string(opts.gate),
                      rm.expander.value);

  auto npA_slot = [m](int i, int j, int k) {
    return (static_cast<size_t>(i) * m + j) * m + k;
  };

  // The A^H pinching identity presumes a parallel principal normal in
  // higher codimension; measure it first and skip eq_ah when it fails.
  rm.parallel_xi_residual = sampled_parallel_xi(cand.chart, ng);
  const bool eq_ah_admissible =
      rm.hypersurface || rm.parallel_xi_residual < opts.parallel_xi_tol;
  auto normH2_f = [&](long i) { return ng.at(i).normH2; };
  auto normA2_f = [&](long i) { return ng.at(i).normA2; };
  auto absH_f = [&](long i) { return ng.at(i).absH; };
  auto ratio_f = [&](long i) { return ng.at(i).ratio_ah; };

  for (long flat = 0; flat < ng.grid.total(); ++flat) {
    const auto idx = ng.grid.multi(flat);
    if (!ng.grid.interior(idx, 1)) continue;
    const NodeGeom& node = ng.at(flat);
    const Jet& jet = node.jet;
    const VectorX& u = jet.u;
    ++rm.evaluated;

    // --- (self 2): nabla^perp_v H + lambda A(grad s, v) ------------------
    {
      std::vector<VectorX> M(static_cast<size_t>(m));
      for (int i = 0; i < m; ++i) {
        VectorX v = node.npH[static_cast<size_t>(i)];
        for (int c = 0; c < m; ++c) v += lambda * jet.t[c] * jet.A_at(c, i);
        M[static_cast<size_t>(i)] = v;
      }
      rm.self2.consider(frame_sup_norm(jet.g, M), u);
    }

    // --- Hessian of H: (nabla^perp)^2_{p,q} H ----------------------------
    std::vector<VectorX> hessH(static_cast<size_t>(m) * m);
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        VectorX v(ng.n);
        for (int d = 0; d < ng.n; ++d) {
          auto comp = [&](long i) {
            return ng.at(i).npH[static_cast<size_t>(q)][d];
          };
          v[d] = d1_field(ng, comp, flat, p);
        }
        v = jet.P_perp * v;
        for (int c = 0; c < m; ++c)
          v -= jet.Gamma[c](p, q) * node.npH[static_cast<size_t>(c)];
        hessH[static_cast<size_t>(p) * m + q] = v;
      }

    // sum_{k,l} A^H(e_k,e_l) A(e_k,e_l).
    VectorX sumAHA = VectorX::Zero(ng.n);
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b)
            sumAHA += jet.g_inv(p, a) * jet.g_inv(q, b) * node.AH(p, q) *
                      jet.A_at(a, b);

    // --- (self 3) residual tensor, traced, and (self 4) direct -----------
    {
      VectorX v4_traced = VectorX::Zero(ng.n);
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
          VectorX r3 = hessH[static_cast<size_t>(p) * m + q] +
                       lambda * jet.A_at(p, q);
          for (int c = 0; c < m; ++c)
            r3 += lambda * jet.t[c] * node.npA[npA_slot(c, p, q)];
          for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
              r3 += jet.g_inv(a, b) * node.AH(p, a) * jet.A_at(q, b);
          v4_traced += jet.g_inv(p, q) * r3;
        }

      VectorX deltaH = VectorX::Zero(ng.n);
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          deltaH += jet.g_inv(p, q) * hessH[static_cast<size_t>(p) * m + q];
      VectorX drift = VectorX::Zero(ng.n);
      for (int c = 0; c < m; ++c)
        drift += jet.t[c] * node.npH[static_cast<size_t>(c)];
      const VectorX v4 = deltaH + lambda * drift + sumAHA + lambda * jet.H;

      rm.self4.consider(v4.norm(), u);
      rm.self4_trace_gap = std::max(rm.self4_trace_gap, (v4 - v4_traced).norm());
    }

    // --- (self 5) and the hypersurface form ------------------------------
    {
      const Real lapH2 = laplace_beltrami(ng, normH2_f, flat);
      Real gradH2_norm2 = 0.0;  // |nabla^perp H|^2
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          gradH2_norm2 += jet.g_inv(p, q) *
                          node.npH[static_cast<size_t>(p)].dot(
                              node.npH[static_cast<size_t>(q)]);
      Real drift = 0.0;
      for (int c = 0; c < m; ++c)
        drift += jet.t[c] * d1_field(ng, normH2_f, flat, c);
      const Real self5 = lapH2 - 2.0 * gradH2_norm2 + lambda * drift +
                         2.0 * node.normAH2 + 2.0 * lambda * node.normH2;
      rm.self5.consider(std::abs(self5), u);
      if (rm.hypersurface) {
        const Real self5h = lapH2 - 2.0 * gradH2_norm2 + lambda * drift +
                            2.0 * (node.normA2 + lambda) * node.normH2;
        rm.self5h.consider(std::abs(self5h), u);
        rm.self5_vs_5h_gap =
            std::max(rm.self5_vs_5h_gap, std::abs(self5 - self5h));
      }
    }

    // --- (self 6h): Delta^perp A + lambda nabla^perp_{grad s} A
    //                + (|A|^2 + lambda) A ---------------------------------
    if (rm.hypersurface) {
      std::vector<VectorX> T(static_cast<size_t>(m) * m);
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
          VectorX lapA = VectorX::Zero(ng.n);
          for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
              VectorX second(ng.n);
              for (int d = 0; d < ng.n; ++d) {
                auto comp = [&](long i) {
                  return ng.at(i).npA[npA_slot(b, p, q)][d];
                };
                second[d] = d1_field(ng, comp, flat, a);
              }
              second = jet.P_perp * second;
              for (int c = 0; c < m; ++c)
                second -= jet.Gamma[c](a, b) * node.npA[npA_slot(c, p, q)] +
                          jet.Gamma[c](a, p) * node.npA[npA_slot(b, c, q)] +
                          jet.Gamma[c](a, q) * node.npA[npA_slot(b, p, c)];
              lapA += jet.g_inv(a, b) * second;
            }
          VectorX v = lapA + (node.normA2 + lambda) * jet.A_at(p, q);
          for (int c = 0; c < m; ++c)
            v += lambda * jet.t[c] * node.npA[npA_slot(c, p, q)];
          T[static_cast<size_t>(p) * m + q] = v;
        }
      rm.self6h.consider(tensor2_norm(jet, T), u);
    }

    // --- (self 6hb): the |A|^2 scalar identity ----------------------------
    if (rm.hypersurface) {
      const Real lapA2 = laplace_beltrami(ng, normA2_f, flat);
      Real gradA_norm2 = 0.0;  // |nabla^perp A|^2
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          for (int k = 0; k < m; ++k)
            for (int p = 0; p < m; ++p)
              for (int q = 0; q < m; ++q)
                for (int r = 0; r < m; ++r)
                  gradA_norm2 += jet.g_inv(i, p) * jet.g_inv(j, q) *
                                 jet.g_inv(k, r) *
                                 node.npA[npA_slot(i, j, k)].dot(
                                     node.npA[npA_slot(p, q, r)]);
      Real drift = 0.0;
      for (int c = 0; c < m; ++c)
        drift += jet.t[c] * d1_field(ng, normA2_f, flat, c);
      const Real self6hb = lapA2 - 2.0 * gradA_norm2 + lambda * drift +
                           2.0 * (node.normA2 + lambda) * node.normA2;
      rm.self6hb.consider(std::abs(self6hb), u);
    }

    // --- (eq ah): drift-elliptic identity for |A^H|^2/|H|^4 --------------
    if (!node.pinch_ok || !neighbors_pinch_ok(ng, flat)) {
      if (!node.pinch_ok) ++rm.pinching_undefined;
      continue;
    }
    if (eq_ah_admissible) {
      const Real lap_ratio = laplace_beltrami(ng, ratio_f, flat);
      VectorX d_ratio(m), d_absH(m);
      for (int c = 0; c < m; ++c) {
        d_ratio[c] = d1_field(ng, ratio_f, flat, c);
        d_absH[c] = d1_field(ng, absH_f, flat, c);
      }
      // B = A^H / |H| and its covariant derivative.
      std::vector<MatrixX> dB(static_cast<size_t>(m));
      for (int c = 0; c < m; ++c) {
        MatrixX D(m, m);
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q) {
            auto comp = [&](long i) {
              const NodeGeom& nd = ng.at(i);
              return nd.AH(p, q) / nd.absH;
            };
            D(p, q) = d1_field(ng, comp, flat, c);
          }
        const MatrixX& B0 = node.AH;  // B = AH/absH at the center
        MatrixX covD = D;
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q)
            for (int e = 0; e < m; ++e)
              covD(p, q) -= jet.Gamma[e](c, p) * B0(e, q) / node.absH +
                            jet.Gamma[e](c, q) * B0(p, e) / node.absH;
        dB[static_cast<size_t>(c)] = covD;
      }
      // T_{c,pq} = d_c|H| B_pq - |H| (nabla_c B)_pq; N2 = full contraction.
      Real N2 = 0.0;
      for (int c = 0; c < m; ++c)
        for (int a = 0; a < m; ++a)
          for (int p = 0; p < m; ++p)
            for (int b = 0; b < m; ++b)
              for (int q = 0; q < m; ++q)
                for (int d = 0; d < m; ++d) {
                  const Real Tc = d_absH[c] * node.AH(p, q) / node.absH -
                                  node.absH * dB[static_cast<size_t>(c)](p, q);
                  const Real Ta = d_absH[a] * node.AH(b, d) / node.absH -
                                  node.absH * dB[static_cast<size_t>(a)](b, d);
                  N2 += jet.g_inv(c, a) * jet.g_inv(p, b) * jet.g_inv(q, d) *
                        Tc * Ta;
                }
      Real drift_ratio = 0.0, gradH_gradRatio = 0.0;
      for (int c = 0; c < m; ++c) drift_ratio += jet.t[c] * d_ratio[c];
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          gradH_gradRatio += jet.g_inv(a, b) * d_absH[a] * d_ratio[b];
      const Real H4 = node.normH2 * node.normH2;
      const Real res = lap_ratio - (2.0 / H4) * N2 + lambda * drift_ratio +
                       (2.0 / node.absH) * gradH_gradRatio;
      rm.eq_ah.consider(std::abs(res), u);
    }
  }

  // Flat product directions must contribute nothing.
  if (cand.chart.flat_dims > 0) {
    for (long flat = 0; flat < ng.grid.total(); ++flat) {
      if (!ng.grid.interior(ng.grid.multi(flat), 1)) continue;
      for (int axis = m - cand.chart.flat_dims; axis < m; ++axis) {
        rm.flat_direction_residual =
            std::max({rm.flat_direction_residual,
                      std::abs(d1_field(ng, normH2_f, flat, axis)),
                      std::abs(d1_field(ng, normA2_f, flat, axis))});
      }
    }
  }

  return rm;
}

QSquaredResult q_squared(const ExpanderCandidate& cand, const VectorX& u,
                         Real h) {
  const Chart& chart = cand.chart;
  if (chart.dim_ambient - chart.dim_domain != 1)
    throw ValidationError("q_squared is defined for hypersurfaces");
  if (h <= 0.0) h = 1e-3;
  const Jet jet = make_jet(chart, u);
  if (jet.H.squaredNorm() <= kEpsH)
    throw ValidationError("q_squared undefined: |H|^2 below threshold");
  const int m = jet.m;

  const auto npA = nabla_perp_A(chart, jet);
  const auto npH = nabla_perp_H_from(jet, npA);
  auto slot = [m](int i, int j, int k) {
    return (static_cast<size_t>(i) * m + j) * m + k;
  };

  Real gradA2 = 0.0, gradH2 = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      gradH2 += jet.g_inv(i, j) * npH[static_cast<size_t>(i)].dot(
                                      npH[static_cast<size_t>(j)]);
      for (int k = 0; k < m; ++k)
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q)
            for (int r = 0; r < m; ++r)
              gradA2 += jet.g_inv(i, p) * jet.g_inv(j, q) * jet.g_inv(k, r) *
                        npA[slot(i, j, k)].dot(npA[slot(p, q, r)]);
    }

  auto scalars_at = [&](const VectorX& v) {
    const Jet jv = make_jet(chart, v);
    Real a2 = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l)
            a2 += jv.g_inv(i, k) * jv.g_inv(j, l) *
                  jv.A_at(i, j).dot(jv.A_at(k, l));
    return std::pair<Real, Real>(a2, jv.H.squaredNorm());
  };

  VectorX dA2(m), dH2(m);
  for (int c = 0; c < m; ++c) {
    VectorX up = u, um = u;
    up[c] += h;
    um[c] -= h;
    const auto sp = scalars_at(up);
    const auto sm = scalars_at(um);
    dA2[c] = (sp.first - sm.first) / (2.0 * h);
    dH2[c] = (sp.second - sm.second) / (2.0 * h);
  }
  Real cross = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) cross += jet.g_inv(a, b) * dA2[a] * dH2[b];

  const auto s0 = scalars_at(u);
  QSquaredResult out;
  out.raw = gradA2 * s0.second + s0.first * gradH2 - 0.5 * cross;
  out.value = std::max(out.raw, 0.0);
  return out;
}

namespace {

struct PinchField {
  NodeGrid ng;
  bool hypersurface = false;

  Real ratio(long flat) const {
    const NodeGeom& node = ng.at(flat);
    return hypersurface ? node.normA2 / node.normH2 : node.ratio_ah;
  }
};

PinchField build_pinch_field(const ExpanderCandidate& cand,
                             const Eigen::VectorXi& grid, int threads) {
  PinchField pf;
  pf.ng = build_grid(cand, grid, threads, false);
  pf.hypersurface = (pf.ng.n - pf.ng.m == 1);
  return pf;
}

}  // namespace

Real pinching_sup_outside(const ExpanderCandidate& cand, Real radius,
                          const Eigen::VectorXi& grid) {
  const PinchField pf = build_pinch_field(cand, grid, resolve_threads(0));
  Real sup = 0.0;
  bool tail = false, defined = false;
  for (long flat = 0; flat < pf.ng.grid.total(); ++flat) {
    const NodeGeom& node = pf.ng.at(flat);
    if (node.jet.F.norm() <= radius) continue;
    tail = true;
    if (!node.pinch_ok) continue;
    defined = true;
    sup = std::max(sup, pf.ratio(flat));
  }
  if (!tail)
    throw ValidationError("empty tail: no grid points outside the radius");
  if (!defined)
    throw ValidationError(
        "pinching undefined at every grid point outside the radius");
  return sup;
}

std::vector<std::pair<Real, Real>> pinching_mu_ladder(
    const ExpanderCandidate& cand, const std::vector<Real>& radii,
    const Eigen::VectorXi& grid) {
  const PinchField pf = build_pinch_field(cand, grid, resolve_threads(0));
  std::vector<std::pair<Real, Real>> out;
  out.reserve(radii.size());
  for (Real r : radii) {
    Real sup = 0.0;
    bool tail = false, defined = false;
    for (long flat = 0; flat < pf.ng.grid.total(); ++flat) {
      const NodeGeom& node = pf.ng.at(flat);
      if (node.jet.F.norm() <= r) continue;
      tail = true;
      if (!node.pinch_ok) continue;
      defined = true;
      sup = std::max(sup, pf.ratio(flat));
    }
    if (!tail || !defined)
      throw ValidationError("empty tail at ladder radius " + std::to_string(r));
    out.emplace_back(r, sup);
  }
  return out;
}

RigidityReport rigidity_report(const ExpanderCandidate& cand,
                               const VerifyOptions& opts) {
  const int threads = resolve_threads(opts.threads);
  const PinchField pf = build_pinch_field(cand, opts.grid, threads);
  const NodeGrid& ng = pf.ng;

  RigidityReport rr;
  rr.hypersurface = pf.hypersurface;
  ArgMaxReal gate;
  for (long flat = 0; flat < ng.grid.total(); ++flat) {
    const NodeGeom& node = ng.at(flat);
    gate.consider((node.jet.H - cand.lambda * node.jet.F_perp).norm(),
                  node.jet.u);
  }
  rr.gate_residual = gate.value;
  rr.gate_passed = gate.value <= opts.gate;
  if (!rr.gate_passed)
    throw GateRefusal("expander residual " + std::to_string(gate.value) +
                          " exceeds the identity gate",
                      gate.value);

  // Pinching statistics and interior-maximum verdict.
  bool any = false;
  Real pmin = 0.0, pmax = 0.0;
  long argmax = -1;
  for (long flat = 0; flat < ng.grid.total(); ++flat) {
    const NodeGeom& node = ng.at(flat);
    if (!node.pinch_ok) {
      ++rr.pinching_undefined;
      continue;
    }
    const Real v = pf.ratio(flat);
    if (!any) {
      pmin = pmax = v;
      argmax = flat;
      any = true;
    } else {
      pmin = std::min(pmin, v);
      if (v > pmax) {
        pmax = v;
        argmax = flat;
      }
    }
  }
  rr.pinch_min = pmin;
  rr.pinch_max = pmax;
  if (!any) {
    rr.max_verdict = "undefined";
  } else if (pmax - pmin < rr.constancy_tol) {
    rr.max_verdict = "constant";
  } else {
    rr.max_verdict = "no_interior_max";
    const auto idx = ng.grid.multi(argmax);
    if (ng.grid.interior(idx, 1)) {
      // strict dominance over the full 1-ring
      bool dominates = true;
      const int m = ng.m;
      std::vector<int> off(static_cast<size_t>(m), -1);
      for (;;) {
        bool self = true;
        auto probe = idx;
        for (int i = 0; i < m; ++i) {
          probe[static_cast<size_t>(i)] += off[static_cast<size_t>(i)];
          if (off[static_cast<size_t>(i)] != 0) self = false;
        }
        if (!self) {
          const long nb = ng.grid.flat(probe);
          if (!ng.at(nb).pinch_ok ||
              pf.ratio(nb) + rr.constancy_tol >= pmax) {
            dominates = false;
            break;
          }
        }
        int axis = m - 1;
        while (axis >= 0 && off[static_cast<size_t>(axis)] == 1) {
          off[static_cast<size_t>(axis)] = -1;
          --axis;
        }
        if (axis < 0) break;
        ++off[static_cast<size_t>(axis)];
      }
      if (dominates) rr.max_verdict = "interior_max";
    }
  }

  // Eigen-structure of A^H.
  bool eig_any = false;
  for (long flat = 0; flat < ng.grid.total(); ++flat) {
    const NodeGeom& node = ng.at(flat);
    if (!node.pinch_ok) continue;
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixX> solver(node.AH,
                                                             node.jet.g);
    const VectorX ev = solver.eigenvalues();
    int nonzero = 0;
    for (Index i = 0; i < ev.size(); ++i)
      if (std::abs(ev[i]) > 1e-6) ++nonzero;
    Real top = ev.cwiseAbs().maxCoeff();
    if (!eig_any) {
      rr.eig_nonzero_min = rr.eig_nonzero_max = nonzero;
      eig_any = true;
    } else {
      rr.eig_nonzero_min = std::min(rr.eig_nonzero_min, nonzero);
      rr.eig_nonzero_max = std::max(rr.eig_nonzero_max, nonzero);
    }
    rr.eig_top_vs_H2 =
        std::max(rr.eig_top_vs_H2, std::abs(top - node.normH2));
  }

  // Parallel principal normal on a subsample.
  rr.parallel_xi_residual = sampled_parallel_xi(cand.chart, ng);

  // mu ladder over radius quantiles with a guaranteed nonempty last tail.
  {
    Real rmin = 0.0, rmax = 0.0;
    bool first = true;
    for (long flat = 0; flat < ng.grid.total(); ++flat) {
      const Real r = ng.at(flat).jet.F.norm();
      if (first) {
        rmin = rmax = r;
        first = false;
      } else {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
    }
    const Real fractions[] = {0.0, 0.2, 0.4, 0.6, 0.75};
    std::vector<Real> radii;
    for (Real f : fractions) radii.push_back(rmin + f * (rmax - rmin) - 1e-12);
    for (Real r : radii) {
      Real sup = 0.0;
      bool defined = false;
      for (long flat = 0; flat < ng.grid.total(); ++flat) {
        const NodeGeom& node = ng.at(flat);
        if (node.jet.F.norm() <= r || !node.pinch_ok) continue;
        defined = true;
        sup = std::max(sup, pf.ratio(flat));
      }
      if (defined) rr.mu_ladder.emplace_back(r, sup);
    }
  }

  if (any && rr.max_verdict == "constant" && std::abs(rr.pinch_max - 1.0) < 1e-6 &&
      rr.eig_nonzero_min == 1 && rr.eig_nonzero_max == 1) {
    rr.hint = "consistent with product Gamma x R^" + std::to_string(ng.m - 1);
  }
  return rr;
}

nlohmann::ordered_json residual_map_json(const ResidualMap& rm) {
  auto entry = [](const ArgMaxReal& a) {
    nlohmann::ordered_json j;
    j["max"] = a.value;
    j["at"] = a.at.size() > 0
                  ? nlohmann::ordered_json(std::vector<Real>(
                        a.at.data(), a.at.data() + a.at.size()))
                  : nlohmann::ordered_json(nullptr);
    return j;
  };
  nlohmann::ordered_json j;
  j["expander"] = entry(rm.expander);
  j["self2"] = entry(rm.self2);
  j["self4"] = entry(rm.self4);
  if (rm.hypersurface) {
    j["self5h"] = entry(rm.self5h);
    j["self6h"] = entry(rm.self6h);
    j["self6hb"] = entry(rm.self6hb);
  }
  j["self5"] = entry(rm.self5);
  j["eq_ah"] = entry(rm.eq_ah);
  j["hypersurface"] = rm.hypersurface;
  j["evaluated_points"] = rm.evaluated;
  j["pinching_undefined_points"] = rm.pinching_undefined;
  j["self4_trace_gap"] = rm.self4_trace_gap;
  j["self5_vs_5h_gap"] = rm.self5_vs_5h_gap;
  j["parallel_xi_residual"] = rm.parallel_xi_residual;
  j["flat_direction_residual"] = rm.flat_direction_residual;
  return j;
}

nlohmann::ordered_json rigidity_json(const RigidityReport& rr) {
  nlohmann::ordered_json j;
  j["gate"] = {{"expander_residual", rr.gate_residual},
               {"passed", rr.gate_passed}};
  j["pinching"] = {{"min", rr.pinch_min},
                   {"max", rr.pinch_max},
                   {"undefined_points", rr.pinching_undefined},
                   {"max_verdict", rr.max_verdict},
                   {"constancy_tol", rr.constancy_tol}};
  nlohmann::ordered_json ladder = nlohmann::ordered_json::array();
  for (const auto& [r, mu] : rr.mu_ladder)
    ladder.push_back(nlohmann::ordered_json::array({r, mu}));
  j["pinching"]["mu_ladder"] = std::move(ladder);
  j["eigen_summary"] = {{"nonzero_min", rr.eig_nonzero_min},
                        {"nonzero_max", rr.eig_nonzero_max},
                        {"top_vs_H2", rr.eig_top_vs_H2},
                        {"tolerance", 1e-6}};
  j["parallel_xi_residual"] = rr.parallel_xi_residual;
  j["hint"] = rr.hint;
  return j;
}

}  // namespace mcf
