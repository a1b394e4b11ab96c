// expanderlab: command-line laboratory for self-expanding solutions of
// curve shortening / mean curvature flow. Subcommands: curve, family,
// verify, flow. Exit codes: 0 success, 2 validation error, 3 property
// violation, 4 gate refusal, 5 non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcf/charts.hpp"
#include "mcf/expander_curve.hpp"
#include "mcf/expander_verify.hpp"
#include "mcf/flow.hpp"
#include "mcf/geometry_report.hpp"
#include "mcf/io.hpp"
#include "mcf/structure_residuals.hpp"

using nlohmann::ordered_json;
using namespace mcf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitProperty = 3;
constexpr int kExitGate = 4;
constexpr int kExitNotConverged = 5;

std::string timestamp_utc() {
  char buf[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const std::string& path, const ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<Real> parse_list(const std::string& csv) {
  std::vector<Real> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    size_t pos = 0;
    const Real v = std::stod(cell, &pos);
    if (pos != cell.size()) throw ValidationError("bad number: " + cell);
    out.push_back(v);
  }
  return out;
}

struct CurveArgs {
  Real lambda = 0.0, r0 = -1.0, s_max = 0.0, step = 1e-3;
  std::string out = "curve";
  std::string format = "json";
};

int cmd_curve(const CurveArgs& a) {
  if (!(a.lambda > 0.0)) throw ValidationError("--lambda must be positive");
  if (!(a.r0 >= 0.0)) throw ValidationError("--r0 must be non-negative");
  const Real s_max = a.s_max > 0.0 ? a.s_max : 6.0 / std::sqrt(a.lambda);

  const ExpanderCurve curve =
      integrate_expander_curve({a.lambda, a.r0}, s_max, a.step);
  const auto inv = conserved_invariant(curve);
  const Real tau = total_curvature(curve);
  const Real residual = curve_residual(curve);

  // The angle needs decayed endpoint curvature; extend s_max if the
  // requested window is too short (the exported CSV keeps the request).
  IntegrateOptions io;
  io.step = a.step;
  io.s_max_hint = s_max;
  const ExpanderCurve for_angle =
      integrate_until_asymptotic({a.lambda, a.r0}, io);
  const Real alpha = asymptotic_angle(for_angle);

  std::ofstream csv(a.out + ".csv", std::ios::binary);
  if (!csv) throw ValidationError("cannot open " + a.out + ".csv");
  write_curve_csv(curve, csv);

  ordered_json j;
  j["lambda"] = a.lambda;
  j["r0"] = a.r0;
  j["s_max"] = s_max;
  j["step"] = a.step;
  j["alpha"] = alpha;
  j["alpha_s_max"] = for_angle.s[for_angle.size() - 1];
  j["total_curvature"] = tau;
  j["alpha_plus_total_curvature_minus_pi"] = alpha + tau - kPi;
  j["invariant_value"] = inv.values[curve.center()];
  j["invariant_deviation"] = inv.max_relative_deviation;
  j["invariant_saturated"] = inv.saturated;
  j["residual"] = residual;
  j["decay_ratio_tol"] = 1e-10;
  j["timestamp"] = timestamp_utc();
  write_json(a.out + ".json", j);

  write_text_file(a.out + ".gp",
                  "set size ratio -1\nset grid\n"
                  "plot '" + a.out + ".csv' using 2:3 with lines title 'curve'\n");
  std::cout << "curve: alpha = " << format_real(alpha)
            << ", invariant deviation = "
            << format_real(inv.max_relative_deviation) << "\n";
  return kExitOk;
}

struct FamilyArgs {
  Real lambda = 0.0;
  std::string r0_list;
  Real step = 1e-3;
  std::string out = "family";
};

int cmd_family(const FamilyArgs& a) {
  if (!(a.lambda > 0.0)) throw ValidationError("--lambda must be positive");
  const auto r0s = parse_list(a.r0_list);
  if (r0s.empty()) throw ValidationError("--r0-list must not be empty");

  std::ostringstream csv;
  csv << "r0,alpha,total_curvature\n";
  std::vector<Real> alphas;
  for (const Real r0 : r0s) {
    if (r0 < 0.0) throw ValidationError("r0 must be non-negative");
    IntegrateOptions io;
    io.step = a.step;
    const ExpanderCurve c = integrate_until_asymptotic({a.lambda, r0}, io);
    const Real alpha = asymptotic_angle(c);
    alphas.push_back(alpha);
    csv << format_real(r0) << ',' << format_real(alpha) << ','
        << format_real(total_curvature(c)) << '\n';
  }
  write_text_file(a.out + ".csv", csv.str());
  std::cout << csv.str();

  for (size_t i = 1; i < alphas.size(); ++i)
    if (!(alphas[i] < alphas[i - 1]))
      throw PropertyViolation(
          "family sweep: alpha is not strictly decreasing at r0 = " +
          format_real(r0s[i]));
  return kExitOk;
}

struct VerifyArgs {
  std::string chart = "product";
  Real lambda = 1.0;
  Real r0 = 1.0;
  int extra_dims = 1;
  Real curve_step = 2.5e-4;
  Real s_half = 0.0;
  int grid_s = 1201, grid_t = 5, grid_n = 9;
  Real radius = 1.0, torus_a = 1.0, torus_b = 0.5;
  Real gate = 1e-4;
  Real tol_pde = 1e-4;
  Real tol_gauss = 1e-4, tol_codazzi = 1e-4, tol_ricci = 1e-6,
       tol_simons = 1e-3, tol_position = 1e-5, tol_parallel = 1e-6;
  Real h = 0.0;
  std::vector<std::string> checks;
  std::string curve_csv;
  std::string out = "verify";
  std::string format = "json";
  int threads = 0;
};

Chart build_chart(const VerifyArgs& a) {
  const std::string& name = a.chart;
  if (name == "sphere") return sphere_chart(a.radius);
  if (name == "cylinder") return cylinder_chart(a.radius);
  if (name == "plane") return plane_chart();
  if (name == "line") return line_chart();
  if (name == "torus") return torus_chart(a.torus_a, a.torus_b);
  if (name == "cone") return cone_surface_chart(0.6);
  if (name == "paraboloid") return paraboloid_chart();
  if (name == "graph4") return random_cubic_graph_chart();
  if (name.rfind("graph:", 0) == 0) {
    std::vector<VectorX> heights;
    std::stringstream ss(name.substr(6));
    std::string fn;
    while (std::getline(ss, fn, ';')) {
      const auto vals = parse_list(fn);
      VectorX c = VectorX::Zero(10);
      for (size_t i = 0; i < vals.size() && i < 10; ++i)
        c[static_cast<Index>(i)] = vals[i];
      heights.push_back(c);
    }
    return graph_chart(heights);
  }
  if (name == "product") {
    ExpanderCurve curve;
    if (!a.curve_csv.empty()) {
      std::ifstream in(a.curve_csv);
      if (!in) throw ValidationError("cannot read " + a.curve_csv);
      curve = read_curve_csv(in, a.lambda);
    } else {
      curve = integrate_expander_curve(
          {a.lambda, a.r0}, 6.0 / std::sqrt(a.lambda), a.curve_step);
    }
    ProductOptions po;
    po.n_s = a.grid_s;
    po.n_t = a.grid_t;
    if (a.s_half > 0.0) po.s_half = a.s_half;
    return product_with_flat(curve, a.extra_dims, po);
  }
  throw ValidationError("unknown chart: " + name +
                        " (sphere | cylinder | plane | line | torus | "
                        "cone | paraboloid | graph4 | graph:<coeffs> | product)");
}

int cmd_verify(const VerifyArgs& a) {
  const Chart chart = build_chart(a);

  ordered_json j;
  j["chart"] = chart.name;
  j["lambda"] = a.lambda;
  j["tolerances"] = {{"gate", a.gate},           {"pde", a.tol_pde},
                     {"gauss", a.tol_gauss},     {"codazzi", a.tol_codazzi},
                     {"ricci", a.tol_ricci},     {"simons", a.tol_simons},
                     {"position", a.tol_position},
                     {"parallel_xi", a.tol_parallel}};

  if (!a.checks.empty()) {
    // Structure-equation mode: per-point residual maxima over the grid.
    ReportOptions ro;
    ro.h = a.h;
    ro.threads = a.threads;
    const GeometryReport rep = geometry_report(chart, ro);
    Real gauss = 0, codazzi = 0, ricci = 0, simons = 0, position = 0,
         parallel = 0;
    for (const auto& rec : rep.records) {
      if (rec.gauss) gauss = std::max(gauss, *rec.gauss);
      if (rec.codazzi) codazzi = std::max(codazzi, *rec.codazzi);
      if (rec.ricci) ricci = std::max(ricci, *rec.ricci);
      if (rec.simons) simons = std::max(simons, *rec.simons);
      if (rec.position) position = std::max(position, *rec.position);
      if (rec.xi_parallel_residual)
        parallel = std::max(parallel, *rec.xi_parallel_residual);
    }
    j["residual_maxima"] = {{"gauss", gauss},     {"codazzi", codazzi},
                            {"ricci", ricci},     {"simons", simons},
                            {"position", position},
                            {"parallel_xi", parallel}};
    j["timestamp"] = timestamp_utc();
    write_json(a.out + ".json", j);
    if (a.format == "csv") write_text_file(a.out + ".csv", report_csv(rep));

    bool ok = true;
    for (const auto& check : a.checks) {
      Real value = 0, tol = 0;
      if (check == "gauss") { value = gauss; tol = a.tol_gauss; }
      else if (check == "codazzi") { value = codazzi; tol = a.tol_codazzi; }
      else if (check == "ricci") { value = ricci; tol = a.tol_ricci; }
      else if (check == "simons") { value = simons; tol = a.tol_simons; }
      else if (check == "position") { value = position; tol = a.tol_position; }
      else if (check == "parallel") { value = parallel; tol = a.tol_parallel; }
      else throw ValidationError("unknown --check: " + check);
      std::cout << check << " residual max = " << format_real(value)
                << " (tolerance " << format_real(tol) << ")\n";
      ok = ok && value < tol;
    }
    if (!ok)
      throw PropertyViolation("a requested structure residual exceeds its "
                              "tolerance");
    return kExitOk;
  }

  // Expander verification mode.
  ExpanderCandidate cand{chart, a.lambda};
  VerifyOptions vo;
  vo.gate = a.gate;
  vo.threads = a.threads;
  try {
    const ResidualMap rm = pde_residuals(cand, vo);
    const RigidityReport rr = rigidity_report(cand, vo);
    j["gate"] = {{"expander_residual", rm.expander.value}, {"passed", true}};
    j["residuals"] = residual_map_json(rm);
    const ordered_json rj = rigidity_json(rr);
    j["pinching"] = rj["pinching"];
    j["eigen_summary"] = rj["eigen_summary"];
    j["parallel_xi_residual"] = rj["parallel_xi_residual"];
    j["hint"] = rj["hint"];
    j["timestamp"] = timestamp_utc();
    write_json(a.out + ".json", j);

    const Real worst =
        std::max({rm.self2.value, rm.self4.value, rm.self5.value,
                  rm.self5h.value, rm.self6h.value, rm.self6hb.value,
                  rm.eq_ah.value});
    std::cout << "expander residual " << format_real(rm.expander.value)
              << ", worst identity residual " << format_real(worst) << "\n";
    if (worst >= a.tol_pde)
      throw PropertyViolation("an identity residual exceeds --tol-pde");
  } catch (const GateRefusal& e) {
    j["gate"] = {{"expander_residual", e.expander_residual},
                 {"passed", false}};
    j["timestamp"] = timestamp_utc();
    write_json(a.out + ".json", j);
    throw;
  }
  return kExitOk;
}

struct FlowArgs {
  Real alpha = 0.0, lambda = 1.0, t_end = 2.0;
  int n = 400;
  Real r_far = 10.0, dt_safety = 0.25;
  int resample_every = 5;
  Real threshold = 5e-2;
  std::string out = "flow";
};

int cmd_flow(const FlowArgs& a) {
  if (!(a.alpha > 0.0 && a.alpha < kPi))
    throw ValidationError("--alpha must lie in (0, pi)");
  if (!(a.lambda > 0.0)) throw ValidationError("--lambda must be positive");
  if (!(a.t_end > 0.0)) throw ValidationError("--t-end must be positive");

  const Real r0 = shoot_for_angle(a.lambda, a.alpha);
  const ExpanderCurve expander = integrate_until_asymptotic({a.lambda, r0});

  FlowCurve cone = init_cone(a.alpha, a.r_far, a.n);
  FlowCurve start = resample_uniform(cone);
  FlowConfig cfg;
  cfg.dt_safety = a.dt_safety;
  cfg.resample_every = a.resample_every;
  cfg.lambda = a.lambda;

  const Real offset = cone_orbit_time_offset(a.lambda);
  const std::vector<Real> orbit_times = {a.t_end / 4.0, a.t_end / 2.0,
                                         a.t_end};
  std::vector<Real> durations;
  for (const Real t : orbit_times) durations.push_back(t + offset);
  std::vector<FlowCurve> snaps = run_csf(start, cfg, durations);

  std::ostringstream csv;
  csv << "t,x,y\n";
  std::vector<Real> distances;
  for (size_t i = 0; i < snaps.size(); ++i) {
    FlowCurve s = snaps[i];
    s.time = orbit_times[i];  // orbit clock (see cone_orbit_time_offset)
    distances.push_back(rescaled_compare(s, expander, a.lambda));
    for (const auto& p : snaps[i].points)
      csv << format_real(orbit_times[i]) << ',' << format_real(p.x()) << ','
          << format_real(p.y()) << '\n';
    csv << '\n';
  }
  write_text_file(a.out + "_snapshots.csv", csv.str());

  ordered_json j;
  j["alpha"] = a.alpha;
  j["lambda"] = a.lambda;
  j["r0"] = r0;
  j["times"] = orbit_times;
  j["flow_durations"] = durations;
  j["orbit_time_offset"] = offset;
  j["distances"] = distances;
  j["n_points"] = a.n;
  j["dt_safety"] = a.dt_safety;
  j["resample_every"] = a.resample_every;
  j["r_far"] = a.r_far;
  j["threshold"] = a.threshold;
  j["timestamp"] = timestamp_utc();
  write_json(a.out + ".json", j);
  write_text_file(
      a.out + ".gp",
      "set size ratio -1\nset grid\n"
      "plot '" + a.out + "_snapshots.csv' using 2:3 with lines title 'flow'\n");

  for (size_t i = 0; i < distances.size(); ++i)
    std::cout << "t = " << format_real(orbit_times[i])
              << ": rescaled distance = " << format_real(distances[i]) << "\n";
  if (!(distances.back() < a.threshold))
    throw NotConverged("final rescaled distance " +
                           format_real(distances.back()) +
                           " is not below the threshold " +
                           format_real(a.threshold),
                       distances.back());
  for (size_t i = 1; i < distances.size(); ++i)
    if (!(distances[i] < distances[i - 1]))
      throw NotConverged(
          "rescaled distance is not strictly decreasing across the "
          "snapshots",
          distances.back());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expanderlab: numerical laboratory for self-expanding "
               "solutions of curve shortening / mean curvature flow"};
  app.require_subcommand(1);

  CurveArgs ca;
  auto* curve = app.add_subcommand(
      "curve", "integrate one self-expanding curve and export CSV/JSON");
  curve->add_option("--lambda", ca.lambda, "expander constant")->required();
  curve->add_option("--r0", ca.r0, "distance of the curve to the origin")
      ->required();
  curve->add_option("--s-max", ca.s_max, "arc-length half-window");
  curve->add_option("--step", ca.step, "arc-length step");
  curve->add_option("--out", ca.out, "output path prefix");
  curve->add_option("--format", ca.format, "summary format (json|csv)");

  FamilyArgs fa;
  auto* family = app.add_subcommand(
      "family", "sweep r0 values and tabulate asymptotic angles");
  family->add_option("--lambda", fa.lambda)->required();
  family->add_option("--r0-list", fa.r0_list, "comma-separated r0 values")
      ->required();
  family->add_option("--step", fa.step);
  family->add_option("--out", fa.out);

  VerifyArgs va;
  auto* verify = app.add_subcommand(
      "verify", "geometry and expander-identity verification on a chart");
  verify->add_option("--chart", va.chart, "chart name")->required();
  verify->add_option("--lambda", va.lambda);
  verify->add_option("--r0", va.r0);
  verify->add_option("--extra-dims", va.extra_dims);
  verify->add_option("--curve-step", va.curve_step);
  verify->add_option("--s-half", va.s_half);
  verify->add_option("--grid-s", va.grid_s);
  verify->add_option("--grid-t", va.grid_t);
  verify->add_option("--radius", va.radius);
  verify->add_option("--torus-a", va.torus_a);
  verify->add_option("--torus-b", va.torus_b);
  verify->add_option("--gate", va.gate);
  verify->add_option("--tol-pde", va.tol_pde);
  verify->add_option("--tol-gauss", va.tol_gauss);
  verify->add_option("--tol-codazzi", va.tol_codazzi);
  verify->add_option("--tol-ricci", va.tol_ricci);
  verify->add_option("--tol-simons", va.tol_simons);
  verify->add_option("--tol-position", va.tol_position);
  verify->add_option("--tol-parallel", va.tol_parallel);
  verify->add_option("--fd-h", va.h, "FD step for residual operations");
  verify->add_option("--check", va.checks,
                     "structure residuals to check "
                     "(gauss|codazzi|ricci|simons|position|parallel)");
  verify->add_option("--curve-csv", va.curve_csv,
                     "build the product chart from an exported curve CSV");
  verify->add_option("--out", va.out);
  verify->add_option("--format", va.format);
  verify->add_option("--threads", va.threads);

  FlowArgs fl;
  auto* flow = app.add_subcommand(
      "flow", "cone curve-shortening run with self-similar comparison");
  flow->add_option("--alpha", fl.alpha, "cone opening angle")->required();
  flow->add_option("--lambda", fl.lambda);
  flow->add_option("--t-end", fl.t_end);
  flow->add_option("--n", fl.n);
  flow->add_option("--r-far", fl.r_far);
  flow->add_option("--dt-safety", fl.dt_safety);
  flow->add_option("--resample-every", fl.resample_every);
  flow->add_option("--threshold", fl.threshold);
  flow->add_option("--out", fl.out);

  try {
    app.parse(argc, argv);
    if (*curve) return cmd_curve(ca);
    if (*family) return cmd_family(fa);
    if (*verify) return cmd_verify(va);
    if (*flow) return cmd_flow(fl);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const GateRefusal& e) {
    std::cerr << "gate refusal: " << e.what() << "\n";
    return kExitGate;
  } catch (const NotConverged& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const PropertyViolation& e) {
    std::cerr << "property violation: " << e.what() << "\n";
    return kExitProperty;
  } catch (const NotYetAsymptotic& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitValidation;
}
