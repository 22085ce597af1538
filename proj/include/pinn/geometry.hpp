#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace pinn {

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Axis-aligned box [lo_0,hi_0] x ... x [lo_{d-1},hi_{d-1}].
struct Box {
  std::vector<double> lo, hi;

  Box() = default;
  Box(std::vector<double> lo_, std::vector<double> hi_);
  /// [lo,hi]^d
  static Box cube(int d, double lo, double hi);

  int dim() const noexcept { return static_cast<int>(lo.size()); }
  double extent(int axis) const { return hi[axis] - lo[axis]; }
  double measure() const;
  /// Total (d-1)-dimensional measure of the boundary; 2 for an interval.
  double boundary_measure() const;
  bool contains(std::span<const double> y, double tol = 0.0) const;
  /// Maps columns of `unit` from [0,1]^d into the box.
  Eigen::MatrixXd map_from_unit(const Eigen::MatrixXd& unit) const;
};

/// Space-time cylinder [0,T] x D. Point coordinates are ordered (t, x_1..x_d).
struct Geometry {
  Box space;
  double t_final = 1.0;
  /// Opposite spatial faces are identified; only the low faces carry
  /// boundary collocation points, each paired with its image on the high face.
  bool periodic = false;

  int spatial_dim() const noexcept { return space.dim(); }
  int input_dim() const noexcept { return space.dim() + 1; }
  Box space_time() const;
};

}  // namespace pinn
