#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pinn {

/// Returns f(x) and overwrites `grad` with the gradient at x.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct OptimResult {
  std::vector<double> x;
  double loss = 0.0;
  /// Objective value after each iteration, starting with the initial value.
  std::vector<double> history;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  /// Set when the line search could not find an acceptable step; `x` is then
  /// the best point seen.
  bool line_search_failed = false;
  std::string message;
};

struct AdamOptions {
  int steps = 1000;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Full-batch Adam. Throws DivergenceError when the objective stops being finite.
OptimResult adam_run(const Objective& f, std::span<const double> x0, const AdamOptions& options = {});

struct LbfgsOptions {
  int max_iters = 1000;
  int history = 50;
  /// Stop when the Euclidean gradient norm falls to this value.
  double tolerance = 1e-10;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 30;
  /// Stop when an accepted step lowers f by no more than ftol * max(|f|, 1).
  /// Zero disables the test.
  double ftol = 0.0;
};

/// Limited-memory BFGS with a strong Wolfe line search (cubic interpolation
/// in the zoom phase). Throws DivergenceError if f(x0) is not finite.
OptimResult lbfgs_run(const Objective& f, std::span<const double> x0, const LbfgsOptions& options = {});

}  // namespace pinn
