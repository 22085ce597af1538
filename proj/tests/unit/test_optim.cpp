#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"

#include "pinn/errors.hpp"
#include "pinn/optim.hpp"
#include "pinn/rng.hpp"

using namespace pinn;

namespace {

double shifted_square(std::span<const double> x, std::span<double> g) {
  g[0] = 2.0 * (x[0] - 3.0);
  return (x[0] - 3.0) * (x[0] - 3.0);
}

double rosenbrock(std::span<const double> x, std::span<double> g) {
  const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
  g[0] = -2.0 * a - 400.0 * x[0] * b;
  g[1] = 200.0 * b;
  return a * a + 100.0 * b * b;
}

}  // namespace

TEST_CASE("adam on a shifted square") {
  AdamOptions o;
  o.steps = 2000;
  o.learning_rate = 0.1;
  const std::vector<double> x0{0.0};
  const OptimResult r = adam_run(shifted_square, x0, o);
  CHECK(std::abs(r.x[0] - 3.0) <= 1e-4);
  CHECK(r.history.size() == 2001);
}

TEST_CASE("adam on Rosenbrock") {
  AdamOptions o;
  o.steps = 50000;
  o.learning_rate = 1e-2;
  const std::vector<double> x0{-1.2, 1.0};
  const OptimResult r = adam_run(rosenbrock, x0, o);
  CHECK(std::hypot(r.x[0] - 1.0, r.x[1] - 1.0) <= 1e-2);
}

TEST_CASE("zero gradient leaves the parameters alone") {
  const Objective flat = [](std::span<const double>, std::span<double> g) {
    for (double& v : g) v = 0.0;
    return 4.0;
  };
  const std::vector<double> x0{0.3, -1.7, 2.5};
  const OptimResult a = adam_run(flat, x0, {});
  CHECK(a.x == x0);
  const OptimResult l = lbfgs_run(flat, x0, {});
  CHECK(l.x == x0);
  CHECK(l.converged);
}

TEST_CASE("adam aborts on a non-finite loss") {
  const Objective bad = [](std::span<const double> x, std::span<double> g) {
    g[0] = -1.0;
    return x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : -x[0];
  };
  AdamOptions o;
  o.learning_rate = 0.1;
  const std::vector<double> x0{0.0};
  CHECK_THROWS_AS(adam_run(bad, x0, o), DivergenceError);
  CHECK_THROWS_AS(lbfgs_run(bad, std::vector<double>{1.0}, {}), DivergenceError);
}

TEST_CASE("lbfgs on a convex quadratic in 10 dimensions") {
  // f = 1/2 x^T A x - b^T x with A = Q^T Q + I, Q random.
  Rng rng(7);
  Eigen::MatrixXd q(10, 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) q(i, j) = rng.uniform(-1.0, 1.0);
  const Eigen::MatrixXd a = q.transpose() * q + Eigen::MatrixXd::Identity(10, 10);
  Eigen::VectorXd b(10);
  for (int i = 0; i < 10; ++i) b(i) = rng.uniform(-1.0, 1.0);
  const Objective f = [&](std::span<const double> xs, std::span<double> gs) {
    Eigen::Map<const Eigen::VectorXd> x(xs.data(), 10);
    Eigen::Map<Eigen::VectorXd> g(gs.data(), 10);
    g = a * x - b;
    return 0.5 * x.dot(a * x) - b.dot(x);
  };
  LbfgsOptions o;
  o.max_iters = 30;
  o.tolerance = 1e-10;
  const OptimResult r = lbfgs_run(f, std::vector<double>(10, 0.0), o);
  CHECK(r.converged);
  CHECK(r.iterations <= 30);
  Eigen::Map<const Eigen::VectorXd> x(r.x.data(), 10);
  CHECK((a * x - b).norm() <= 1e-10);
  const Eigen::VectorXd exact = a.ldlt().solve(b);
  CHECK((x - exact).norm() <= 1e-9);
}

TEST_CASE("lbfgs on a shifted square and Rosenbrock") {
  const OptimResult s = lbfgs_run(shifted_square, std::vector<double>{0.0}, {});
  CHECK(std::abs(s.x[0] - 3.0) <= 1e-8);

  LbfgsOptions o;
  o.max_iters = 200;
  o.tolerance = 1e-12;
  const OptimResult r = lbfgs_run(rosenbrock, std::vector<double>{-1.2, 1.0}, o);
  CHECK(r.iterations <= 200);
  CHECK(std::hypot(r.x[0] - 1.0, r.x[1] - 1.0) <= 1e-6);

  // Cross-check against the Adam minimizer.
  AdamOptions ao;
  ao.steps = 50000;
  ao.learning_rate = 1e-2;
  const OptimResult a = adam_run(rosenbrock, std::vector<double>{-1.2, 1.0}, ao);
  CHECK(std::hypot(r.x[0] - a.x[0], r.x[1] - a.x[1]) <= 1e-2);
}

TEST_CASE("lbfgs accepted steps never increase the objective") {
  const OptimResult r = lbfgs_run(rosenbrock, std::vector<double>{-1.2, 1.0}, {});
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("lbfgs reports a failed line search and keeps the best point") {
  // Gradient points the wrong way, so no step along -g decreases f.
  const Objective liar = [](std::span<const double> x, std::span<double> g) {
    g[0] = -2.0 * x[0];
    return x[0] * x[0];
  };
  const OptimResult r = lbfgs_run(liar, std::vector<double>{1.0}, {});
  CHECK(r.line_search_failed);
  CHECK(r.x[0] == 1.0);
  CHECK(r.loss == 1.0);
}
