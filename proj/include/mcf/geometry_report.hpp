#ifndef MCF_GEOMETRY_REPORT_HPP
#define MCF_GEOMETRY_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcf/fundamental_forms.hpp"
#include "mcf/grid.hpp"

namespace mcf {

// Derived scalars and residual maxima at one grid point. Quantities that
// are undefined there (pinching below the |H|^2 threshold, principal
// curvatures off hypersurfaces, residuals without stencil room) are null.
struct GeometryRecord {
  VectorX u;
  Real normA2 = 0.0;
  Real normH2 = 0.0;
  Real S = 0.0;        // scalar curvature |H|^2 - |A|^2
  Real s_value = 0.0;  // |F|^2 / 2
  std::optional<Real> pinch_hyp;  // |A|^2/|H|^2
  std::optional<Real> pinch_AH;   // |A^H|^2/|H|^4
  std::optional<VectorX> principal_curvatures;
  std::optional<Real> xi_parallel_residual;
  std::optional<Real> gauss, codazzi, ricci, simons, position;
};

struct ReportOptions {
  Eigen::VectorXi grid;   // override; empty uses the chart default
  Real h = 0.0;           // FD step for the residual operations
  bool with_residuals = true;
  int threads = 0;
};

struct GeometryReport {
  std::string chart_name;
  GridSpec grid;
  std::vector<GeometryRecord> records;
};

// Parallel map over the grid followed by a single-writer reduction; record
// order is the deterministic row-major grid order.
GeometryReport geometry_report(const Chart& chart,
                               const ReportOptions& opts = {});

nlohmann::ordered_json report_json(const GeometryReport& report);
std::string report_csv(const GeometryReport& report);

}  // namespace mcf

#endif  // MCF_GEOMETRY_REPORT_HPP
