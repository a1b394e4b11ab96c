#ifndef MCF_GRID_HPP
#define MCF_GRID_HPP

#include <vector>

#include "mcf/chart.hpp"

namespace mcf {

// Tensor evaluation grid over a chart's parameter box, nodes including the
// boundary, flat row-major indexing (last axis fastest).
struct GridSpec {
  Eigen::VectorXi dims;
  VectorX lo, hi;

  int rank() const { return static_cast<int>(dims.size()); }

  long total() const {
    long t = 1;
    for (int i = 0; i < rank(); ++i) t *= dims[i];
    return t;
  }

  VectorX spacing() const {
    VectorX h(rank());
    for (int i = 0; i < rank(); ++i)
      h[i] = (hi[i] - lo[i]) / static_cast<Real>(std::max(dims[i] - 1, 1));
    return h;
  }

  std::vector<int> multi(long flat) const {
    std::vector<int> idx(static_cast<size_t>(rank()));
    for (int i = rank() - 1; i >= 0; --i) {
      idx[static_cast<size_t>(i)] = static_cast<int>(flat % dims[i]);
      flat /= dims[i];
    }
    return idx;
  }

  long flat(const std::vector<int>& idx) const {
    long f = 0;
    for (int i = 0; i < rank(); ++i) f = f * dims[i] + idx[static_cast<size_t>(i)];
    return f;
  }

  long neighbor(long flat_idx, int axis, int offset) const {
    long stride = 1;
    for (int i = rank() - 1; i > axis; --i) stride *= dims[i];
    return flat_idx + offset * stride;
  }

  VectorX point(const std::vector<int>& idx) const {
    VectorX u(rank());
    const VectorX h = spacing();
    for (int i = 0; i < rank(); ++i)
      u[i] = lo[i] + h[i] * idx[static_cast<size_t>(i)];
    return u;
  }

  bool interior(const std::vector<int>& idx, int ring) const {
    for (int i = 0; i < rank(); ++i) {
      if (idx[static_cast<size_t>(i)] < ring ||
          idx[static_cast<size_t>(i)] >= dims[i] - ring)
        return false;
    }
    return true;
  }
};

inline GridSpec chart_grid(const Chart& chart,
                           const Eigen::VectorXi& override_dims = {}) {
  GridSpec g;
  g.dims = override_dims.size() > 0 ? override_dims : chart.grid;
  if (g.dims.size() != chart.dim_domain)
    throw ValidationError("grid dimensions do not match the chart");
  g.lo = chart.lo;
  g.hi = chart.hi;
  return g;
}

}  // namespace mcf

#endif  // MCF_GRID_HPP
