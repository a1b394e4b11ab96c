#include "mcf/geometry_report.hpp"

#include <sstream>

#include "mcf/io.hpp"
#include "mcf/parallel.hpp"
#include "mcf/structure_residuals.hpp"

namespace mcf {

GeometryReport geometry_report(const Chart& chart, const ReportOptions& opts) {
  GeometryReport report;
  report.chart_name = chart.name;
  report.grid = chart_grid(chart, opts.grid);
  const long total = report.grid.total();
  report.records.resize(static_cast<size_t>(total));

  const int threads = resolve_threads(opts.threads);
  parallel_for(total, threads, [&](long flat) {
    auto& rec = report.records[static_cast<size_t>(flat)];
    const auto idx = report.grid.multi(flat);
    const VectorX u = report.grid.point(idx);
    rec.u = u;

    const Jet jet = make_jet(chart, u);
    const FundamentalForms f = fundamental_forms(jet);
    rec.normA2 = norm_A2(f);
    rec.normH2 = norm_H2(f);
    rec.S = rec.normH2 - rec.normA2;
    rec.s_value = jet.s_value();
    if (rec.normH2 > kEpsH) {
      rec.pinch_hyp = rec.normA2 / rec.normH2;
      rec.pinch_AH = norm_AH2(f) / (rec.normH2 * rec.normH2);
    }
    if (f.n - f.m == 1) rec.principal_curvatures = principal_curvatures(f);

    if (!opts.with_residuals) return;
    const int m = f.m;
    const int codim = f.n - f.m;
    try {
      rec.position = position_identity_residual(chart, u, opts.h).max();
      Real gauss = 0.0, codazzi = 0.0, ricci = 0.0, simons = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          for (int k = 0; k < m; ++k)
            for (int l = k; l < m; ++l)
              gauss = std::max(gauss,
                               gauss_residual(chart, u, i, j, k, l, opts.h));
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          for (int k = 0; k < m; ++k)
            codazzi =
                std::max(codazzi, codazzi_residual(chart, u, i, j, k, opts.h));
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          for (int a = 0; a < codim; ++a)
            ricci = std::max(ricci, ricci_residual(chart, u, i, j, a, opts.h));
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
          simons = std::max(simons, simons_residual(chart, u, i, j, opts.h).value);
      rec.gauss = gauss;
      rec.codazzi = codazzi;
      rec.ricci = ricci;
      rec.simons = simons;
      if (rec.normH2 > kEpsH)
        rec.xi_parallel_residual =
            principal_normal_parallel_residual(chart, u, opts.h);
    } catch (const StencilError&) {
      // boundary-adjacent nodes keep null residuals
    }
  });
  return report;
}

namespace {

nlohmann::ordered_json opt_json(const std::optional<Real>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

nlohmann::ordered_json report_json(const GeometryReport& report) {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& rec : report.records) {
    nlohmann::ordered_json row;
    row["u"] = std::vector<Real>(rec.u.data(), rec.u.data() + rec.u.size());
    row["normA2"] = rec.normA2;
    row["normH2"] = rec.normH2;
    row["pinch_hyp"] = opt_json(rec.pinch_hyp);
    row["pinch_AH"] = opt_json(rec.pinch_AH);
    row["S"] = rec.S;
    row["s_value"] = rec.s_value;
    if (rec.principal_curvatures) {
      row["principal_curvatures"] = std::vector<Real>(
          rec.principal_curvatures->data(),
          rec.principal_curvatures->data() + rec.principal_curvatures->size());
    } else {
      row["principal_curvatures"] = nullptr;
    }
    row["xi_parallel_residual"] = opt_json(rec.xi_parallel_residual);
    row["residuals"] = {{"gauss", opt_json(rec.gauss)},
                        {"codazzi", opt_json(rec.codazzi)},
                        {"ricci", opt_json(rec.ricci)},
                        {"simons", opt_json(rec.simons)},
                        {"position", opt_json(rec.position)}};
    records.push_back(std::move(row));
  }
  nlohmann::ordered_json out;
  out["chart"] = report.chart_name;
  out["grid"] = std::vector<int>(report.grid.dims.data(),
                                 report.grid.dims.data() + report.grid.dims.size());
  out["records"] = std::move(records);
  return out;
}

std::string report_csv(const GeometryReport& report) {
  std::ostringstream out;
  out << "u,normA2,normH2,pinch_hyp,pinch_AH,S,s_value,principal_curvatures,"
         "xi_parallel_residual,gauss,codazzi,ricci,simons,position\n";
  auto cell = [&](const std::optional<Real>& v) {
    return v ? format_real(*v) : std::string();
  };
  for (const auto& rec : report.records) {
    std::string u;
    for (Index i = 0; i < rec.u.size(); ++i) {
      if (i) u += ';';
      u += format_real(rec.u[i]);
    }
    std::string pcs;
    if (rec.principal_curvatures)
      for (Index i = 0; i < rec.principal_curvatures->size(); ++i) {
        if (i) pcs += ';';
        pcs += format_real((*rec.principal_curvatures)[i]);
      }
    out << u << ',' << format_real(rec.normA2) << ',' << format_real(rec.normH2)
        << ',' << cell(rec.pinch_hyp) << ',' << cell(rec.pinch_AH) << ','
        << format_real(rec.S) << ',' << format_real(rec.s_value) << ',' << pcs
        << ',' << cell(rec.xi_parallel_residual) << ',' << cell(rec.gauss)
        << ',' << cell(rec.codazzi) << ',' << cell(rec.ricci) << ','
        << cell(rec.simons) << ',' << cell(rec.position) << '\n';
  }
  return out.str();
}

}  // namespace mcf
