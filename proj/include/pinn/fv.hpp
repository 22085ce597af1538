#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "pinn/problem.hpp"

namespace pinn {

/// Space-time array of cell averages from the explicit finite-volume scheme.
struct FvGrid {
  int n_cells = 0;
  double x_lo = 0.0, x_hi = 1.0;
  double dx = 0.0, dt = 0.0, cfl = 0.0;
  int n_steps = 0;
  bool periodic = false;
  std::vector<double> times;                       // stored time levels, increasing
  std::vector<std::vector<double>> cell_averages;  // one row of n_cells per stored level
  /// Dirichlet data at the two ends per stored level (unused when periodic).
  std::vector<double> left_values, right_values;
  /// Largest per-step mismatch between the change of sum(u) dx and the net
  /// boundary flux.
  double max_mass_drift = 0.0;

  double center(int i) const { return x_lo + (i + 0.5) * dx; }
  double t_end() const { return times.back(); }
};

struct FvOptions {
  /// Approximate number of stored time slices.
  int stored_slices = 1000;
};

/// Courant number used for reference runs. Low numerical diffusion keeps the
/// smeared rarefaction corner within about dx of the exact fan.
inline constexpr double kReferenceCfl = 0.9;

/// Godunov (convex flux with a sonic point) or upwind flux plus a central
/// viscous term, forward Euler in time with a fixed step. The step satisfies
/// dt max|f'|/dx <= cfl and dt <= dx^2/(4 nu). Throws StabilityError unless
/// 0 < cfl <= 1.
FvGrid fv_solve(const ProblemSpec& spec, int n_cells, double t_end, double cfl, FvOptions options = {});

/// Bilinear interpolation in (x, t) of the cell averages at points given as
/// columns (t, x). Throws DomainError outside the solved box.
Eigen::VectorXd sample_reference(const FvGrid& grid, const Eigen::MatrixXd& points);

/// t,x,u rows for every stride-th stored level.
void write_fv_csv(std::ostream& out, const FvGrid& grid, int level_stride = 1);

/// Interface flux used by the scheme.
double godunov_flux(const FluxSpec& flux, double left, double right);

}  // namespace pinn
