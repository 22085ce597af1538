#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pinn/geometry.hpp"
#include "pinn/jet.hpp"
#include "pinn/model.hpp"
#include "pinn/quadrature.hpp"

namespace pinn {

enum class ProblemKind { Heat, ConservationLaw, Euler };
enum class BoundaryKind { Dirichlet, Periodic, NoPenetration };

/// Scalar flux f with its first two derivatives.
struct FluxSpec {
  std::string name;
  std::function<double(double)> f, f_prime, f_second;
  /// Minimizer of a convex flux, used by the Godunov flux. Without it the
  /// finite-volume scheme upwinds on the sign of f'.
  std::optional<double> sonic_point;

  static FluxSpec burgers();  // u^2/2
  static FluxSpec zero();
  static FluxSpec linear(double speed);
};

/// Semilinear heat source f(u), globally Lipschitz with constant `lipschitz`.
struct SourceTerm {
  std::function<double(double)> f, f_prime;
  double lipschitz = 0.0;
  bool is_zero = true;

  static SourceTerm zero();
};

/// Anything that can produce jets at a batch of (t, x) points.
class JetSource {
 public:
  virtual ~JetSource() = default;
  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual JetBatch evaluate(const Eigen::MatrixXd& points, const JetRequest& request) const = 0;
};

/// Closed-form field with analytic derivatives.
class AnalyticField : public JetSource {
 public:
  /// Full jet (value, all first and pure second derivatives) at one point.
  virtual Jet jet(std::span<const double> y) const = 0;
  virtual Eigen::VectorXd value(std::span<const double> y) const { return jet(y).value; }
  JetBatch evaluate(const Eigen::MatrixXd& points, const JetRequest& request) const override;
  /// Values at every column, m x B.
  Eigen::MatrixXd values(const Eigen::MatrixXd& points) const;
};

/// Jets of a trained model.
class ModelSource : public JetSource {
 public:
  explicit ModelSource(const Model& model) : model_(&model) {}
  int input_dim() const override { return model_->input_dim(); }
  int output_dim() const override { return model_->output_dim(); }
  JetBatch evaluate(const Eigen::MatrixXd& points, const JetRequest& request) const override;

 private:
  const Model* model_;
};

using PointFunction = std::function<Eigen::VectorXd(std::span<const double>)>;

struct ProblemSpec {
  std::string name;
  ProblemKind kind = ProblemKind::Heat;
  Geometry geometry;
  int output_dim = 1;
  BoundaryKind boundary = BoundaryKind::Dirichlet;
  /// Diffusion coefficient: 1 for the heat equation, the viscosity otherwise.
  double nu = 0.0;
  std::optional<FluxSpec> flux;
  SourceTerm source = SourceTerm::zero();
  /// x -> target of the initial-time residual (velocity only for Euler).
  PointFunction initial_data;
  /// (t, x) -> Dirichlet boundary value; null means zero.
  PointFunction boundary_data;
  /// (t, x) -> Euler body force; null means zero.
  PointFunction forcing;
  std::shared_ptr<const AnalyticField> exact;

  int spatial_dim() const noexcept { return geometry.spatial_dim(); }
  int input_dim() const noexcept { return geometry.input_dim(); }
};

/// Per-point residuals; one column per collocation point.
struct ResidualBundle {
  Eigen::MatrixXd interior;           // heat/Burgers: 1 row; Euler: velocity residual, d rows
  Eigen::MatrixXd divergence;         // Euler only, 1 row
  Eigen::MatrixXd spatial_boundary;   // rows depend on boundary kind
  Eigen::MatrixXd temporal_boundary;  // rows = components of the initial data
  std::vector<int> sb_labels;
};

// Jets each residual needs.
JetRequest interior_request(const ProblemSpec& spec);
JetRequest boundary_request(const ProblemSpec& spec);
JetRequest initial_request(const ProblemSpec& spec);

/// Rows of the interior residual matrix; the last one is the divergence for Euler.
int interior_rows(const ProblemSpec& spec);
/// Row index of the divergence residual, -1 if absent.
int divergence_row(const ProblemSpec& spec);

Eigen::MatrixXd interior_residual(const ProblemSpec& spec, const Eigen::MatrixXd& points,
                                  const JetBatch& jets);
/// Accumulates rbar^T d(residual)/d(jets) into `adjoint`.
void interior_pullback(const ProblemSpec& spec, const Eigen::MatrixXd& points, const JetBatch& jets,
                       const Eigen::MatrixXd& rbar, JetBatch& adjoint);

/// `partner` is the jet batch at the paired points for periodic problems.
Eigen::MatrixXd boundary_residual(const ProblemSpec& spec, const Eigen::MatrixXd& points,
                                  std::span<const int> labels, const JetBatch& jets,
                                  const JetBatch* partner);
void boundary_pullback(const ProblemSpec& spec, const Eigen::MatrixXd& points,
                       std::span<const int> labels, const JetBatch& jets, const JetBatch* partner,
                       const Eigen::MatrixXd& rbar, JetBatch& adjoint, JetBatch* partner_adjoint);

Eigen::MatrixXd initial_residual(const ProblemSpec& spec, const Eigen::MatrixXd& points,
                                 const JetBatch& jets);
void initial_pullback(const ProblemSpec& spec, const Eigen::MatrixXd& points, const JetBatch& jets,
                      const Eigen::MatrixXd& rbar, JetBatch& adjoint);

/// All residuals of `source` on the training set.
ResidualBundle residuals(const ProblemSpec& spec, const JetSource& source, const TrainingSet& sets);
ResidualBundle heat_residuals(const JetSource& source, const ProblemSpec& spec, const TrainingSet& sets);
ResidualBundle conservation_law_residuals(const JetSource& source, const ProblemSpec& spec,
                                          const TrainingSet& sets);
ResidualBundle euler_residuals(const JetSource& source, const ProblemSpec& spec, const TrainingSet& sets);

// Closed-form solutions.
double exact_heat_1d(double x, double t);
double exact_heat_nd(std::span<const double> x, double t, int n);
Eigen::Vector2d exact_taylor_vortex(double x, double y, double t, double a_x, double a_y);
/// Step initial data of the rarefaction experiment: 0 for x <= 0, 1 for x > 0.
double rarefaction_initial_data(double x);

/// u = -sin(pi x) exp(-nu pi^2 t)
class Heat1dExact : public AnalyticField {
 public:
  explicit Heat1dExact(double nu = 1.0) : nu_(nu) {}
  int input_dim() const override { return 2; }
  int output_dim() const override { return 1; }
  Jet jet(std::span<const double> y) const override;

 private:
  double nu_;
};

/// u = |x|^2/n + 2t in d spatial dimensions.
class HeatNdExact : public AnalyticField {
 public:
  HeatNdExact(int d, int n) : d_(d), n_(n) {}
  int input_dim() const override { return d_ + 1; }
  int output_dim() const override { return 1; }
  Jet jet(std::span<const double> y) const override;

 private:
  int d_, n_;
};

/// Gaussian vortex advected with constant background velocity; outputs (u, v, p).
class TaylorVortexExact : public AnalyticField {
 public:
  TaylorVortexExact(double a_x, double a_y) : a_x_(a_x), a_y_(a_y) {}
  int input_dim() const override { return 3; }
  int output_dim() const override { return 3; }
  Jet jet(std::span<const double> y) const override;

 private:
  double a_x_, a_y_;
};

/// Inviscid Burgers rarefaction u = clamp(x/t, 0, 1).
class RarefactionExact : public AnalyticField {
 public:
  int input_dim() const override { return 2; }
  int output_dim() const override { return 1; }
  Jet jet(std::span<const double> y) const override;
};

/// Velocity field sampled on a uniform periodic grid.
struct VelocityGrid {
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  std::vector<double> u, v;  // row-major, index iy * nx + ix, point (ix*lx/nx, iy*ly/ny)

  /// Periodic bilinear interpolation at (x, y).
  Eigen::Vector2d sample(double x, double y) const;
};

/// Header line "nx ny Lx Ly" then nx*ny rows "u v" (commas or whitespace).
VelocityGrid read_velocity_grid(const std::filesystem::path& path);
void write_velocity_grid(const std::filesystem::path& path, const VelocityGrid& grid);
/// Double shear layer initial data on [0,2pi]^2 with layer thickness parameter
/// `rho` and perturbation amplitude `delta`.
VelocityGrid double_shear_layer_grid(int n, double rho = 30.0, double delta = 0.05);

// Problem presets.
ProblemSpec heat_1d();
/// Heat equation on [0,1]^n with the quadratic exact solution.
ProblemSpec heat_nd(int n);
/// Burgers on [-1,1] x [0,1] from -sin(pi x) with zero boundary values.
ProblemSpec burgers_sine(double nu);
/// Burgers on [-1,1] x [0,0.5] from the step, boundary values 0 and 1.
ProblemSpec burgers_rarefaction(double nu);
/// General scalar law on [x_lo, x_hi] x [0, T].
ProblemSpec conservation_law(std::string name, FluxSpec flux, double nu, double x_lo, double x_hi,
                             double t_final, std::function<double(double)> initial,
                             std::function<double(double)> left, std::function<double(double)> right);
ProblemSpec taylor_vortex(double a_x = 4.0, double a_y = 0.0);
ProblemSpec double_shear_layer(std::shared_ptr<const VelocityGrid> grid, double t_final);

}  // namespace pinn
