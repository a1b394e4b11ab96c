#ifndef MCF_TYPES_HPP
#define MCF_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mcf {

using Real = double;

using Vector2 = Eigen::Matrix<Real, 2, 1>;
using Vector3 = Eigen::Matrix<Real, 3, 1>;
using VectorX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using Matrix2 = Eigen::Matrix<Real, 2, 2>;
using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using ArrayX = Eigen::Array<Real, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

inline constexpr Real kPi = 3.14159265358979323846;

// |H|^2 below this value counts as "mean curvature vanishes": pinching
// ratios and the principal normal are reported as undefined there.
inline constexpr Real kEpsH = 1e-10;

// Invalid user-supplied parameters (CLI exit code 2).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numerically verified property failed, e.g. a family sweep that is
// expected to be monotone is not (CLI exit code 3).
struct PropertyViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Candidate did not pass the expander gate (CLI exit code 4).
struct GateRefusal : std::runtime_error {
  GateRefusal(const std::string& msg, Real residual)
      : std::runtime_error(msg), expander_residual(residual) {}
  Real expander_residual;
};

// A run finished but its convergence target was missed (CLI exit code 5).
struct NotConverged : std::runtime_error {
  NotConverged(const std::string& msg, Real measured)
      : std::runtime_error(msg), measured(measured) {}
  Real measured;
};

// Curvature has not decayed enough at the endpoints to read off the
// asymptotic cone angle.
struct NotYetAsymptotic : std::runtime_error {
  NotYetAsymptotic(const std::string& msg, Real k_end)
      : std::runtime_error(msg), k_end(k_end) {}
  Real k_end;
};

// Evaluation point too close to the domain boundary for the finite
// difference stencil.
struct StencilError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// dF dropped below full rank at an evaluation point.
struct DegenerateImmersion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mcf

#endif  // MCF_TYPES_HPP
