// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mcf/charts.hpp"
#include "mcf/expander_curve.hpp"
#include "mcf/expander_verify.hpp"
#include "mcf/flow.hpp"
#include "mcf/fundamental_forms.hpp"
#include "mcf/grid.hpp"
#include "mcf/structure_residuals.hpp"

using namespace mcf;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

const ExpanderCurve& standard_curve() {
  static const ExpanderCurve curve =
      integrate_expander_curve({1.0, 1.0}, 6.0, 1e-3);
  return curve;
}

Chart standard_hyperplane(int q, int n_s) {
  ProductOptions po;
  po.n_s = n_s;
  po.n_t = 5;
  po.s_half = 3.0;
  return product_with_flat(standard_curve(), q, po);
}

// ---------------------------------------------------------------------------

void criterion_1_conserved_quantity() {
  Real worst_dev = 0.0;
  double worst_time = 0.0;
  bool ok = true;
  for (Real lambda : {0.5, 1.0, 2.0}) {
    for (Real r0 : {0.25, 0.5, 1.0, 2.0}) {
      const auto t0 = Clock::now();
      const auto curve = integrate_expander_curve(
          {lambda, r0}, 6.0 / std::sqrt(lambda), 1e-3);
      const auto inv = conserved_invariant(curve);
      const double dt = seconds_since(t0);
      worst_dev = std::max(worst_dev, inv.max_relative_deviation);
      worst_time = std::max(worst_time, dt);
      ok = ok && inv.max_relative_deviation < 1e-6 && dt < 1.0;
    }
  }
  report(1, "conserved quantity k*exp(lambda r^2/2)", ok,
         "max relative deviation " + fmt(worst_dev) + " < 1e-6, slowest curve " +
             fmt(worst_time) + " s < 1 s");
}

void criterion_2_total_curvature_relation() {
  Real worst = 0.0;
  bool ok = true;
  for (Real lambda : {0.5, 1.0, 2.0}) {
    for (Real r0 : {0.25, 0.5, 1.0, 2.0}) {
      // Same (lambda, r0, step) sweep; s_max grows adaptively so the
      // asymptotic-angle decay precondition holds (k(s_max) < 1e-10 k(0)).
      IntegrateOptions io;
      io.step = 1e-3;
      io.s_max_hint = 6.0 / std::sqrt(lambda);
      const auto curve = integrate_until_asymptotic({lambda, r0}, io);
      const Real gap =
          std::abs(total_curvature(curve) + asymptotic_angle(curve) - kPi);
      worst = std::max(worst, gap);
      ok = ok && gap < 1e-3;
    }
  }
  report(2, "total curvature + asymptotic angle = pi", ok,
         "max |tau + alpha - pi| " + fmt(worst) + " < 1e-3");
}

void criterion_3_hyperplane_pinching() {
  bool ok = true;
  std::string detail;
  for (int q : {1, 2}) {
    const Chart chart = standard_hyperplane(q, q == 1 ? 401 : 161);
    const GridSpec gs = chart_grid(chart);
    Real lo = 2.0, hi = 0.0;
    for (long flat = 0; flat < gs.total(); ++flat) {
      const auto idx = gs.multi(flat);
      if (!gs.interior(idx, 1)) continue;
      const auto f = fundamental_forms(chart, gs.point(idx));
      const Real h2 = norm_H2(f);
      if (h2 <= kEpsH) continue;
      const Real pinch =
          q == 1 ? norm_A2(f) / h2 : norm_AH2(f) / (h2 * h2);
      lo = std::min(lo, pinch);
      hi = std::max(hi, pinch);
    }
    ok = ok && (hi - lo < 1e-8) && std::abs(hi - 1.0) < 1e-8 &&
         std::abs(lo - 1.0) < 1e-8;
    detail += (q == 1 ? std::string("q=1 |A|^2/|H|^2") : std::string(" q=2 |A^H|^2/|H|^4")) +
              " in [" + fmt(lo) + "-1, " + fmt(hi) + "-1] span " + fmt(hi - lo) + ";";
  }
  report(3, "pinching constant to 1 on Gamma x R^q", ok, detail);
}

void criterion_4_q_squared_vanishing() {
  const Chart chart = standard_hyperplane(1, 401);
  ExpanderCandidate cand{chart, 1.0};
  const Real h = 0.5 * standard_curve().step;  // decorrelates knot noise
  const GridSpec gs = chart_grid(chart);
  Real worst = 0.0;
  for (long flat = 0; flat < gs.total(); ++flat) {
    const auto idx = gs.multi(flat);
    if (!gs.interior(idx, 1)) continue;
    worst = std::max(worst, q_squared(cand, gs.point(idx), h).value);
  }
  report(4, "Q^2 vanishes on the expander hyperplane", worst < 1e-6,
         "max Q^2 " + fmt(worst) + " < 1e-6 over interior grid points");
}

void criterion_5_eigenstructure() {
  const Chart chart = standard_hyperplane(1, 401);
  const GridSpec gs = chart_grid(chart);
  bool ok = true;
  Real worst_gap = 0.0;
  for (long flat = 0; flat < gs.total(); ++flat) {
    const auto idx = gs.multi(flat);
    if (!gs.interior(idx, 1)) continue;
    const auto f = fundamental_forms(chart, gs.point(idx));
    if (norm_H2(f) <= kEpsH) continue;
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixX> solver(a_h(f), f.g);
    const VectorX ev = solver.eigenvalues();
    int nonzero = 0;
    for (Index i = 0; i < ev.size(); ++i)
      if (std::abs(ev[i]) > 1e-6) ++nonzero;
    const Real top = ev.cwiseAbs().maxCoeff();
    worst_gap = std::max(worst_gap, std::abs(top - norm_H2(f)));
    ok = ok && nonzero == 1 && std::abs(top - norm_H2(f)) < 1e-6;
  }
  report(5, "A^H has one nonzero eigenvalue equal to |H|^2", ok,
         "max |top eigenvalue - |H|^2| " + fmt(worst_gap) + " < 1e-6");
}

void criterion_6_structure_equations() {
  const auto t0 = Clock::now();
  struct Entry {
    std::string name;
    Chart chart;
  };
  const std::vector<Entry> charts = {{"sphere", sphere_chart(1.0)},
                                     {"cylinder", cylinder_chart(1.0)},
                                     {"torus", torus_chart(1.0, 0.5)},
                                     {"plane", plane_chart()}};
  VectorX u(2);
  u << 0.45, 0.65;
  Real gauss = 0, codazzi = 0, ricci = 0, simons = 0;
  for (const auto& e : charts) {
    const int m = 2, codim = e.chart.dim_ambient - 2;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
          for (int l = k; l < m; ++l)
            gauss = std::max(gauss, gauss_residual(e.chart, u, i, j, k, l));
          codazzi = std::max(codazzi, codazzi_residual(e.chart, u, i, j, k));
        }
        for (int a = 0; a < codim; ++a)
          ricci = std::max(ricci, ricci_residual(e.chart, u, i, j, a));
      }
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        simons = std::max(simons, simons_residual(e.chart, u, i, j).value);
  }
  bool ok = gauss < 1e-4 && codazzi < 1e-4 && ricci < 1e-6 && simons < 1e-3;

  // Order check: residuals drop ~4x under FD half-step wherever truncation
  // dominates. On the four charts above several residuals sit at round-off
  // zero (closed-form oracles make Codazzi exact), so the check runs where
  // the error is measurable: Gauss on the sphere, Ricci/Simons on the
  // bundled cubic graph, Codazzi on an FD-mode sphere.
  auto ratio_in = [](Real r, Real lo, Real hi) { return r > lo && r < hi; };
  const Real g1 = gauss_residual(sphere_chart(1.0), u, 0, 1, 0, 1, 1e-3);
  const Real g2 = gauss_residual(sphere_chart(1.0), u, 0, 1, 0, 1, 5e-4);
  ok = ok && ratio_in(g1 / g2, 3.5, 4.5);

  const Chart graph = random_cubic_graph_chart();
  VectorX ug(2);
  ug << 0.12, -0.07;
  const Real r1 = ricci_residual(graph, ug, 0, 1, 0, 1e-3);
  const Real r2 = ricci_residual(graph, ug, 0, 1, 0, 5e-4);
  ok = ok && ratio_in(r1 / r2, 3.5, 4.5);
  const Real s1 = simons_residual(graph, ug, 0, 1, 1e-3).value;
  const Real s2 = simons_residual(graph, ug, 0, 1, 5e-4).value;
  ok = ok && ratio_in(s1 / s2, 3.5, 4.5);

  Chart fd_graph = random_cubic_graph_chart();
  fd_graph.d1 = nullptr;
  fd_graph.d2 = nullptr;
  fd_graph.d3 = nullptr;
  fd_graph.fd_step = VectorX::Constant(2, 2e-2);
  const Real c1 = codazzi_residual(fd_graph, ug, 0, 1, 0);
  fd_graph.fd_step = VectorX::Constant(2, 1e-2);
  const Real c2 = codazzi_residual(fd_graph, ug, 0, 1, 0);
  ok = ok && ratio_in(c1 / c2, 3.5, 4.5);

  const double dt = seconds_since(t0);
  ok = ok && dt < 10.0;
  report(6, "structure equations on analytic charts", ok,
         "gauss " + fmt(gauss) + " codazzi " + fmt(codazzi) + " ricci " +
             fmt(ricci) + " simons " + fmt(simons) + "; half-step ratios " +
             fmt(g1 / g2) + "/" + fmt(c1 / c2) + "/" + fmt(r1 / r2) + "/" +
             fmt(s1 / s2) + "; " + fmt(dt) + " s < 10 s");
}

void criterion_7_position_identities() {
  VectorX u(2);
  u << 0.35, 0.65;
  const Real plane = position_identity_residual(plane_chart(), u).max();
  const Real sphere = position_identity_residual(sphere_chart(1.5), u).max();
  VectorX up(2);
  up << 0.35, 0.2;
  const Real prod =
      position_identity_residual(standard_hyperplane(1, 401), up).max();
  const bool ok = plane < 1e-5 && sphere < 1e-5 && prod < 1e-5;
  report(7, "position identities (gradient/Hessian of s, normal part)", ok,
         "plane " + fmt(plane) + ", sphere " + fmt(sphere) + ", hyperplane " +
             fmt(prod) + " all < 1e-5");
}

void criterion_8_expander_pde_identities() {
  ExpanderCandidate cand{standard_hyperplane(1, 2001), 1.0};
  const ResidualMap rm = pde_residuals(cand);
  const bool ok = rm.self2.value < 1e-4 && rm.self5h.value < 1e-4 &&
                  rm.self6hb.value < 1e-4 && rm.eq_ah.value < 1e-4;
  report(8, "self-expander identities on the hyperplane", ok,
         "self2 " + fmt(rm.self2.value) + ", self5h " + fmt(rm.self5h.value) +
             ", self6hb " + fmt(rm.self6hb.value) + ", eq_ah " +
             fmt(rm.eq_ah.value) + " all < 1e-4");
}

void criterion_9_spectrum_lemma() {
  const auto t0 = Clock::now();
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<Real> dist(-1.0, 2.0);
  bool ok = true;
  long tested = 0;
  for (int m : {2, 3, 4, 6}) {
    long accepted = 0;
    long guard = 0;
    while (accepted < 100000 && guard < 100000000) {
      ++guard;
      VectorX spec(m);
      for (int i = 0; i < m; ++i) spec[i] = dist(rng);
      const Real H = spec.sum();
      const Real S = H * H - spec.squaredNorm();
      if (!(H > 0.0 && S > 0.0)) continue;
      ++accepted;
      ++tested;
      const auto r = lemma_bound_check(spec);
      // bound lambda_i < |H| and (m-1)-convexity by brute-force k-sums
      if (!r.bound_holds) ok = false;
      bool all_positive = true;
      for (int mask = 0; mask < (1 << m) && all_positive; ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != m - 1) continue;
        Real sum = 0.0;
        for (int i = 0; i < m; ++i)
          if (mask & (1 << i)) sum += spec[i];
        if (!(sum > 0.0)) all_positive = false;
      }
      if (!all_positive) ok = false;
      if (!(r.k_convexity <= m - 1)) ok = false;
    }
    if (accepted < 100000) ok = false;
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 5.0;
  report(9, "spectrum lemma: lambda_i < |H| and (m-1)-convexity", ok,
         std::to_string(tested) + " admissible spectra, zero violations, " +
             fmt(dt) + " s < 5 s");
}

void criterion_10_mu_ladder() {
  ExpanderCandidate cand{standard_hyperplane(1, 401), 1.0};
  const std::vector<Real> radii = {1.0, 1.5, 2.0, 2.5, 3.0};
  const auto ladder = pinching_mu_ladder(cand, radii);
  bool ok = ladder.size() == radii.size();
  Real worst = 0.0;
  for (size_t i = 0; i < ladder.size(); ++i) {
    worst = std::max(worst, std::abs(ladder[i].second - 1.0));
    ok = ok && std::abs(ladder[i].second - 1.0) < 1e-8;
    if (i) ok = ok && ladder[i].second <= ladder[i - 1].second;
  }
  // nonincreasing also on a candidate with genuinely varying pinching
  ExpanderCandidate par{paraboloid_chart(), 1.0};
  const auto pl = pinching_mu_ladder(par, {0.05, 0.2, 0.4, 0.6});
  for (size_t i = 1; i < pl.size(); ++i)
    ok = ok && pl[i].second <= pl[i - 1].second + 1e-15;
  report(10, "asymptotic pinching sup ladder", ok,
         "max |mu - 1| " + fmt(worst) +
             " < 1e-8 on the hyperplane; nonincreasing everywhere");
}

void criterion_11_shooting_round_trip() {
  Real worst = 0.0;
  for (Real r0 : {0.5, 1.0, 2.0}) {
    const auto curve = integrate_until_asymptotic({1.0, r0});
    const Real back = shoot_for_angle(1.0, asymptotic_angle(curve));
    worst = std::max(worst, std::abs(back - r0));
  }
  report(11, "shooting round-trip on r0", worst < 1e-4,
         "max |shoot(alpha(r0)) - r0| " + fmt(worst) + " < 1e-4");
}

void criterion_12_flow_convergence() {
  const auto t0 = Clock::now();
  const Real alpha = kPi / 2.0, lambda = 1.0;
  const Real r0 = shoot_for_angle(lambda, alpha);
  const ExpanderCurve expander = integrate_until_asymptotic({lambda, r0});
  FlowCurve start = resample_uniform(init_cone(alpha, 10.0, 400));
  FlowConfig cfg;
  const Real off = cone_orbit_time_offset(lambda);
  auto snaps = run_csf(start, cfg, {0.5 + off, 1.0 + off, 2.0 + off});
  std::vector<Real> d;
  for (auto s : snaps) {
    s.time -= off;
    d.push_back(rescaled_compare(s, expander, lambda));
  }
  const double dt = seconds_since(t0);
  const bool ok =
      d[2] < 5e-2 && d[1] < d[0] && d[2] < d[1] && dt < 60.0;
  report(12, "cone flow converges to the shooting expander", ok,
         "distances " + fmt(d[0]) + " > " + fmt(d[1]) + " > " + fmt(d[2]) +
             " with final < 5e-2; " + fmt(dt) + " s < 60 s");
}

void criterion_13_circle_oracle() {
  FlowCurve c = init_circle(1.0, 400);
  FlowConfig cfg;
  cfg.resample_every = 0;
  const auto snaps = run_csf(c, cfg, {0.0625, 0.125, 0.1875, 0.25});
  Real worst = 0.0;
  for (const auto& s : snaps) {
    const Real exact = std::sqrt(1.0 - 2.0 * s.time);
    for (const auto& p : s.points)
      worst = std::max(worst, std::abs(p.norm() - exact));
  }
  report(13, "shrinking-circle oracle for the flow stepper", worst < 1e-3,
         "max radius error " + fmt(worst) + " < 1e-3 up to t = R^2/4");
}

void criterion_14_circ_star_commutation() {
  auto commutator = [](const FundamentalForms& f) {
    BilinearForm AH{{a_h(f)}};
    BilinearForm A;
    for (const auto& comp : f.A_frame) A.comps.push_back(comp);
    const auto left = circ_star(AH, A, f.g_inv);
    const auto right = circ_star(A, AH, f.g_inv);
    Real worst = 0.0;
    for (size_t c = 0; c < left.comps.size(); ++c)
      worst = std::max(
          worst, (left.comps[c] - right.comps[c]).cwiseAbs().maxCoeff());
    return worst;
  };
  VectorX u(2);
  u << 0.4, 0.8;
  const Chart torus = torus_chart(1.0, 0.5);
  const Chart hyper = standard_hyperplane(1, 401);
  VectorX uh(2);
  uh << 0.8, 0.2;
  const Real c_torus = commutator(fundamental_forms(torus, u));
  const Real c_hyper = commutator(fundamental_forms(hyper, uh));
  const Real xi_torus = principal_normal_parallel_residual(torus, u);
  const Real xi_hyper = principal_normal_parallel_residual(hyper, uh);
  const bool ok = c_torus < 1e-8 && c_hyper < 1e-8 && xi_torus < 1e-6 &&
                  xi_hyper < 1e-6;
  report(14, "A^H circ A = A circ A^H with parallel principal normal", ok,
         "commutators " + fmt(c_torus) + "/" + fmt(c_hyper) +
             " < 1e-8; parallel-xi " + fmt(xi_torus) + "/" + fmt(xi_hyper) +
             " < 1e-6");
}

}  // namespace

int main() {
  criterion_1_conserved_quantity();
  criterion_2_total_curvature_relation();
  criterion_3_hyperplane_pinching();
  criterion_4_q_squared_vanishing();
  criterion_5_eigenstructure();
  criterion_6_structure_equations();
  criterion_7_position_identities();
  criterion_8_expander_pde_identities();
  criterion_9_spectrum_lemma();
  criterion_10_mu_ladder();
  criterion_11_shooting_round_trip();
  criterion_12_flow_convergence();
  criterion_13_circle_oracle();
  criterion_14_circ_star_commutation();
  if (g_failures == 0) {
    std::printf("acceptance: all 14 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
