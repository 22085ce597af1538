#include "verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>

#include "pinn/fv.hpp"
#include "pinn/jet.hpp"
#include "pinn/model.hpp"
#include "pinn/rng.hpp"
#include "pinn/trainer.hpp"

namespace pinn::cli {

namespace {

double rel_err(double a, double b, double floor = 1e-3) { return std::abs(a - b) / std::max(std::abs(b), floor); }

struct Check {
  const char* name;
  std::function<std::pair<bool, double>()> run;  // pass flag, reported figure
};

std::pair<bool, double> jet_derivatives() {
  const NetworkParams p = init_params(11, {2, 16, 16, 1}, Activation::Tanh);
  Rng rng(12);
  const double h = 1e-4;
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    std::vector<double> y{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Jet j = forward_jet(p, y);
    for (int d = 0; d < 2; ++d) {
      auto yp = y, ym = y;
      yp[d] += h;
      ym[d] -= h;
      const double fd = (forward(p, yp)(0) - forward(p, ym)(0)) / (2 * h);
      worst = std::max(worst, rel_err(j.grad(0, d), fd));
    }
  }
  return {worst <= 1e-5, worst};
}

std::pair<bool, double> loss_gradient_fd() {
  const ProblemSpec spec = heat_1d();
  const TrainingSet sets = build_training_set(spec.geometry, 64, 8, 8, RuleKind::Sobol, 1);
  const PinnLoss loss(spec, sets, {1.0, 2, 1e-4}, {256, false});
  Model model(init_params(3, layer_dims_for(spec, {2, 10, Activation::Tanh}), Activation::Tanh),
              InputMap::to_symmetric_cube(spec.geometry.space_time()));
  std::vector<double> g(model.params.size());
  loss.evaluate(model, g);
  Rng rng(5);
  std::vector<double> v(g.size());
  for (double& e : v) e = rng.uniform(-1, 1);
  const double h = 1e-6;
  Model mp = model, mm = model;
  for (std::size_t i = 0; i < v.size(); ++i) {
    mp.params.flat()[i] += h * v[i];
    mm.params.flat()[i] -= h * v[i];
  }
  const double fd = (loss.evaluate(mp).total - loss.evaluate(mm).total) / (2 * h);
  double an = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) an += g[i] * v[i];
  const double e = rel_err(an, fd);
  return {e <= 1e-5, e};
}

std::pair<bool, double> exact_residuals() {
  const LossConfig cfg{1.0, 2, 0.0};
  double worst = 0.0;
  for (const ProblemSpec& spec : {heat_1d(), heat_nd(3), taylor_vortex()}) {
    const TrainingSet sets = build_training_set(spec.geometry, 256, 32, 32, RuleKind::MonteCarlo, 7);
    const LossBreakdown b = assemble_loss(*spec.exact, spec, sets, cfg);
    worst = std::max({worst, b.interior, b.div});
  }
  return {worst <= 1e-16, worst};
}

std::pair<bool, double> gauss_legendre_exactness() {
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const QuadratureRule r = gauss_legendre_composite(2, n, Box({0.0}, {1.0}));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      const double got = r.integrate([p](auto y) { return std::pow(y(0), p); });
      worst = std::max(worst, std::abs(got * (p + 1) - 1.0));
    }
  }
  return {worst <= 1e-12, worst};
}

std::pair<bool, double> fv_conservation() {
  const FvGrid g = fv_solve(burgers_rarefaction(0.0), 256, 0.5, kReferenceCfl);
  return {g.max_mass_drift <= 1e-10, g.max_mass_drift};
}

std::pair<bool, double> checkpoint_round_trip() {
  const ProblemSpec spec = taylor_vortex();
  const Model m(init_params(4, layer_dims_for(spec, {2, 8, Activation::Celu}), Activation::Celu),
                InputMap::to_symmetric_cube(spec.geometry.space_time()));
  const Model back = checkpoint_from_json(checkpoint_to_json(m, {{"id", "taylor_vortex"}}));
  Eigen::MatrixXd pts = spec.geometry.space_time().map_from_unit(uniform_random(32, 3, 9));
  const double diff = (m.evaluate(pts) - back.evaluate(pts)).cwiseAbs().maxCoeff();
  return {diff == 0.0, diff};
}

std::pair<bool, double> parallel_matches_serial() {
  const ProblemSpec spec = heat_nd(2);
  const TrainingSet sets = build_training_set(spec.geometry, 1500, 300, 200, RuleKind::Sobol, 1);
  const Model m(init_params(8, layer_dims_for(spec, {2, 12, Activation::Tanh}), Activation::Tanh),
                InputMap::to_symmetric_cube(spec.geometry.space_time()));
  const LossConfig cfg{0.5, 2, 1e-5};
  std::vector<double> gs(m.params.size()), gp(m.params.size());
  const double s = PinnLoss(spec, sets, cfg, {256, false}).evaluate(m, gs).total;
  const double p = PinnLoss(spec, sets, cfg, {256, true}).evaluate(m, gp).total;
  const bool same = s == p && gs == gp;
  return {same, std::abs(s - p)};
}

}  // namespace

bool run_invariant_suite(std::ostream& out) {
  const Check checks[] = {
      {"jet input derivatives vs finite differences", jet_derivatives},
      {"loss parameter gradient vs finite differences", loss_gradient_fd},
      {"exact solutions annihilate interior residuals", exact_residuals},
      {"gauss-legendre exact to degree 2n-1", gauss_legendre_exactness},
      {"finite-volume mass balance", fv_conservation},
      {"checkpoint round trip", checkpoint_round_trip},
      {"parallel loss equals serial loss", parallel_matches_serial},
  };
  bool all = true;
  for (const Check& c : checks) {
    const auto start = std::chrono::steady_clock::now();
    const auto [ok, figure] = c.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char line[160];
    std::snprintf(line, sizeof line, "%s  %-48s %.3g  (%.2fs)\n", ok ? "PASS" : "FAIL", c.name, figure, secs);
    out << line;
    all = all && ok;
  }
  return all;
}

}  // namespace pinn::cli
