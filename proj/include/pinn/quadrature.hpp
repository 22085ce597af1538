#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pinn/geometry.hpp"

namespace pinn {

enum class RuleKind { Sobol, MonteCarlo, GaussLegendre };

std::string_view to_string(RuleKind k);
RuleKind rule_kind_from_string(std::string_view name);

/// Points (one per column) with positive weights summing to the measure of
/// the region they discretize.
struct QuadratureRule {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
  RuleKind kind = RuleKind::MonteCarlo;
  /// Nominal convergence exponent: error ~ N^-alpha.
  double rate_alpha = 0.5;
  /// Boundary face of each point (2*axis + side, axis counted over spatial
  /// coordinates); -1 when not on a face.
  std::vector<int> labels;

  int size() const noexcept { return static_cast<int>(points.cols()); }
  double total_weight() const { return weights.sum(); }
  /// Weighted sum of f over the points.
  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (int n = 0; n < size(); ++n) s += weights(n) * f(points.col(n));
    return s;
  }
};

/// Largest dimension with Sobol direction numbers.
constexpr int kSobolMaxDim = 100;

/// First n points of the d-dimensional Sobol sequence (Joe-Kuo direction
/// numbers), skipping the initial all-zero point. Returns d x n.
Eigen::MatrixXd sobol(int n, int d);

/// n i.i.d. uniform points in [0,1)^d from Rng(seed). Returns d x n.
Eigen::MatrixXd uniform_random(int n, int d, std::uint64_t seed);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Tensor-product Gauss-Legendre rule on a uniform grid of cells over `box`.
QuadratureRule gauss_legendre_composite(int cells_per_axis, int nodes_per_cell, const Box& box);

/// Rule with n points of the given kind filling `box`, equal weights
/// |box|/n for Sobol and Monte Carlo. For Gauss-Legendre, n is rounded to a
/// tensor grid with two nodes per cell. `stream` separates Monte Carlo draws.
QuadratureRule box_rule(RuleKind kind, int n, const Box& box, std::uint64_t seed,
                        std::uint64_t stream = 0);

/// Interior, spatial-boundary and initial-time collocation points.
struct TrainingSet {
  QuadratureRule interior;
  QuadratureRule spatial_boundary;
  QuadratureRule temporal_boundary;
  /// For periodic geometries: the image of each spatial-boundary point on the
  /// opposite face (same column order). Empty otherwise.
  Eigen::MatrixXd sb_partner;

  int n_int() const noexcept { return interior.size(); }
  int n_sb() const noexcept { return spatial_boundary.size(); }
  int n_tb() const noexcept { return temporal_boundary.size(); }
};

/// Interior points strictly inside (0,T) x D, boundary points with one
/// coordinate set exactly to a face, initial points with t = 0 exactly.
/// Boundary points are split over faces in proportion to face measure.
TrainingSet build_training_set(const Geometry& geometry, int n_int, int n_sb, int n_tb,
                               RuleKind kind, std::uint64_t seed);

/// Writes t,x1..xd,weight,set rows for every point of the set.
void write_training_set_csv(std::ostream& out, const TrainingSet& set);

}  // namespace pinn
