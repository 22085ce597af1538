#include <cmath>
#include <limits>
#include <vector>

#include <omp.h>

#include "doctest.h"

#include "pinn/errors.hpp"
#include "pinn/rng.hpp"
#include "pinn/trainer.hpp"

using namespace pinn;

namespace {

Model random_model(const ProblemSpec& spec, int depth, int width, Activation act, std::uint64_t seed) {
  Model m(init_params(seed, layer_dims_for(spec, {depth, width, act}), act),
          InputMap::to_symmetric_cube(spec.geometry.space_time()));
  // Non-zero biases so every parameter matters.
  Rng rng(seed, 5);
  for (int k = 0; k < m.params.num_affine(); ++k)
    for (double& b : m.params.bias(k)) b = rng.uniform(-0.3, 0.3);
  return m;
}

/// Largest relative error of directional derivatives against central
/// differences over `n_dirs` random unit directions.
double directional_fd_error(const PinnLoss& loss, Model model, int n_dirs, std::uint64_t seed) {
  const std::size_t m = model.params.size();
  std::vector<double> grad(m), scratch(m);
  loss.evaluate(model, grad);
  const std::vector<double> theta(model.params.flat().begin(), model.params.flat().end());
  Rng rng(seed, 11);
  double worst = 0.0;
  for (int k = 0; k < n_dirs; ++k) {
    std::vector<double> dir(m);
    double norm = 0.0;
    for (double& v : dir) {
      v = rng.uniform(-1.0, 1.0);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    double analytic = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      dir[j] /= norm;
      analytic += grad[j] * dir[j];
    }
    const double h = 1e-5;
    auto at = [&](double s) {
      for (std::size_t j = 0; j < m; ++j) model.params.flat()[j] = theta[j] + s * dir[j];
      return loss.evaluate(model).total;
    };
    // Fourth-order central difference.
    const double fd = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
    worst = std::max(worst, std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-8));
  }
  return worst;
}

}  // namespace

TEST_CASE("single interior point breakdown") {
  ProblemSpec spec = heat_1d();
  TrainingSet sets;
  sets.interior.points = Eigen::MatrixXd::Zero(2, 1);
  sets.interior.weights = Eigen::VectorXd::Constant(1, 0.5);
  ResidualBundle r;
  r.interior = Eigen::MatrixXd::Constant(1, 1, 2.0);
  const LossBreakdown b = breakdown_from_residuals(r, sets, {1.0, 2, 0.0}, 2);
  CHECK(b.interior == 2.0);
  CHECK(b.total == 2.0);
  CHECK(b.tb == 0.0);
  CHECK(b.sb == 0.0);
}

TEST_CASE("total is the documented combination") {
  ProblemSpec spec = taylor_vortex();
  const TrainingSet sets = build_training_set(spec.geometry, 64, 32, 32, RuleKind::Sobol, 3);
  const Model m = random_model(spec, 2, 6, Activation::Celu, 4);
  const LossConfig cfg{0.3, 1, 1e-3};
  const LossBreakdown b = assemble_loss(m, spec, sets, cfg);
  CHECK(b.div > 0.0);
  CHECK(b.reg > 0.0);
  CHECK(b.total == b.tb + b.sb + cfg.lambda * (b.interior + b.div) + cfg.lambda_reg * b.reg);
  double faces = 0.0;
  for (double f : b.sb_faces) faces += f;
  CHECK(faces == doctest::Approx(b.sb).epsilon(1e-14));
  for (double v : {b.tb, b.sb, b.interior, b.div, b.reg}) CHECK(v >= 0.0);
}

TEST_CASE("exact solutions give a vanishing loss") {
  const LossConfig cfg{1.0, 2, 0.0};
  SUBCASE("heat 1d") {
    const ProblemSpec spec = heat_1d();
    const TrainingSet sets = build_training_set(spec.geometry, 512, 64, 64, RuleKind::Sobol, 1);
    CHECK(assemble_loss(*spec.exact, spec, sets, cfg).total <= 1e-16);
  }
  SUBCASE("heat 3d") {
    const ProblemSpec spec = heat_nd(3);
    const TrainingSet sets = build_training_set(spec.geometry, 512, 128, 64, RuleKind::Sobol, 1);
    CHECK(assemble_loss(*spec.exact, spec, sets, cfg).total <= 1e-16);
  }
  SUBCASE("inviscid rarefaction") {
    const ProblemSpec spec = burgers_rarefaction(0.0);
    const TrainingSet sets = build_training_set(spec.geometry, 512, 64, 64, RuleKind::MonteCarlo, 1);
    CHECK(assemble_loss(*spec.exact, spec, sets, cfg).total <= 1e-16);
  }
}

TEST_CASE("lambda zero removes the interior residual") {
  const ProblemSpec spec = burgers_sine(0.01 / M_PI);
  const TrainingSet sets = build_training_set(spec.geometry, 128, 32, 32, RuleKind::Sobol, 2);
  const Model a = random_model(spec, 2, 8, Activation::Tanh, 1);
  const LossConfig cfg{0.0, 2, 0.0};
  const LossBreakdown b = assemble_loss(a, spec, sets, cfg);
  CHECK(b.interior > 0.0);
  CHECK(b.total == b.tb + b.sb);
  ResidualBundle r = residuals(spec, ModelSource(a), sets);
  const double before = breakdown_from_residuals(r, sets, cfg, 2).total;
  r.interior.array() += 5.0;
  CHECK(breakdown_from_residuals(r, sets, cfg, 2).total == before);
}

TEST_CASE("loss gradient matches directional differences") {
  struct Case {
    const char* name;
    ProblemSpec spec;
    Activation act;
    LossConfig cfg;
  };
  std::vector<Case> cases;
  cases.push_back({"heat 1d", heat_1d(), Activation::Tanh, {0.7, 2, 1e-3}});
  cases.push_back({"heat 2d", heat_nd(2), Activation::Tanh, {1.0, 1, 1e-3}});
  cases.push_back({"viscous burgers", burgers_sine(0.01 / M_PI), Activation::Tanh, {1.3, 2, 0.0}});
  cases.push_back({"rarefaction", burgers_rarefaction(0.0), Activation::Celu, {1.0, 2, 1e-4}});
  cases.push_back({"taylor vortex", taylor_vortex(), Activation::Celu, {0.5, 2, 1e-4}});
  for (const Case& c : cases) {
    CAPTURE(c.name);
    const TrainingSet sets = build_training_set(c.spec.geometry, 96, 40, 40, RuleKind::MonteCarlo, 8);
    const PinnLoss loss(c.spec, sets, c.cfg, {32, true});
    const Model m = random_model(c.spec, 2, 7, c.act, 21);
    CHECK(directional_fd_error(loss, m, 20, 5) <= 1e-4);
  }
}

TEST_CASE("parallel evaluation equals the serial reference bit for bit") {
  const ProblemSpec spec = taylor_vortex();
  const TrainingSet sets = build_training_set(spec.geometry, 700, 130, 90, RuleKind::Sobol, 2);
  const Model m = random_model(spec, 3, 10, Activation::Celu, 6);
  const LossConfig cfg{1.0, 2, 1e-5};
  const PinnLoss serial(spec, sets, cfg, {64, false});
  std::vector<double> gs(m.params.size()), gp(m.params.size());
  const LossBreakdown bs = serial.evaluate(m, gs);
  const int saved = omp_get_max_threads();
  for (int threads : {1, 3, 4}) {
    omp_set_num_threads(threads);
    const PinnLoss par(spec, sets, cfg, {64, true});
    const LossBreakdown bp = par.evaluate(m, gp);
    CHECK(bp.total == bs.total);
    CHECK(gp == gs);
  }
  omp_set_num_threads(saved);
  // Chunking changes only the summation order.
  const PinnLoss coarse(spec, sets, cfg, {100000, false});
  CHECK(coarse.evaluate(m).total == doctest::Approx(bs.total).epsilon(1e-13));
}

TEST_CASE("training selects the best restart and is deterministic") {
  const ProblemSpec spec = heat_1d();
  const TrainingSet sets = build_training_set(spec.geometry, 128, 16, 16, RuleKind::Sobol, 1);
  OptimizerConfig opt;
  opt.iters = 40;
  opt.restarts = 5;
  const LossConfig cfg{1.0, 2, 1e-6};
  const TrainOutcome a = train(spec, sets, {2, 8, Activation::Tanh}, cfg, opt, 17);
  REQUIRE(a.restarts.size() == 5);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : a.restarts) {
    CHECK(r.seed == restart_seed(17, r.index));
    best = std::min(best, r.final_loss);
  }
  CHECK(a.final_breakdown.total == best);
  CHECK(a.restarts[static_cast<std::size_t>(a.restart_index)].final_loss == best);
  const double re = assemble_loss(a.model, spec, sets, cfg).total;
  CHECK(std::abs(re - a.final_breakdown.total) <= 1e-12 * a.final_breakdown.total);
  for (std::size_t i = 1; i < a.loss_history.size(); ++i) CHECK(a.loss_history[i] <= a.loss_history[i - 1]);

  const TrainOutcome b = train(spec, sets, {2, 8, Activation::Tanh}, cfg, opt, 17);
  CHECK(b.model.params == a.model.params);
  CHECK(b.loss_history == a.loss_history);
  CHECK(b.restart_index == a.restart_index);

  OptimizerConfig adam = opt;
  adam.kind = OptimizerKind::Adam;
  adam.learning_rate = 1e-2;
  adam.restarts = 1;
  const TrainOutcome c = train(spec, sets, {2, 8, Activation::Tanh}, cfg, adam, 17);
  CHECK(c.final_breakdown.total < c.loss_history.front());
}

TEST_CASE("all restarts diverging is an error") {
  ProblemSpec spec = heat_1d();
  spec.initial_data = [](std::span<const double>) {
    return Eigen::VectorXd::Constant(1, std::numeric_limits<double>::quiet_NaN());
  };
  const TrainingSet sets = build_training_set(spec.geometry, 32, 8, 8, RuleKind::Sobol, 1);
  OptimizerConfig opt;
  opt.iters = 5;
  opt.restarts = 2;
  CHECK_THROWS_AS(train(spec, sets, {1, 4, Activation::Tanh}, {}, opt, 1), DivergenceError);
}

TEST_CASE("1d heat trains to a small loss") {
  const ProblemSpec spec = heat_1d();
  const TrainingSet sets = build_training_set(spec.geometry, 1024, 64, 64, RuleKind::Sobol, 1);
  OptimizerConfig opt;
  opt.iters = 2000;
  const TrainOutcome out = train(spec, sets, {4, 20, Activation::Tanh}, {1.0, 2, 0.0}, opt, 1);
  MESSAGE("1d heat loss " << out.final_breakdown.total << " after " << out.restarts[0].iterations);
  CHECK(out.final_breakdown.total <= 1e-5);
}
