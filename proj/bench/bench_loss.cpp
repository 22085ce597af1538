// Serial reference against OpenMP chunked evaluation of the loss and its
// gradient. Also checks the two agree bit for bit.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "pinn/runtime.hpp"
#include "pinn/trainer.hpp"

namespace {

struct Case {
  std::string name;
  pinn::ProblemSpec spec;
  int n_int, n_b;
  pinn::Architecture arch;
};

double seconds_per_eval(const pinn::PinnLoss& loss, const pinn::Model& m, std::vector<double>& g, int reps) {
  loss.evaluate(m, g);  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) loss.evaluate(m, g);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  pinn::keep_freed_heap();
  CLI::App app{"loss evaluation benchmark"};
  int reps = 5, threads = 0, chunk = 256;
  app.add_option("--reps", reps, "evaluations per timing")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)");
  app.add_option("--chunk", chunk, "points per work item")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  const std::vector<Case> cases{
      {"heat_1d", pinn::heat_1d(), 1024, 64, {4, 20, pinn::Activation::Tanh}},
      {"heat_nd5", pinn::heat_nd(5), 8192, 2048, {4, 20, pinn::Activation::Tanh}},
      {"burgers_shock", pinn::burgers_sine(0.01 / 3.141592653589793), 4096, 256, {8, 20, pinn::Activation::Tanh}},
      {"taylor_vortex", pinn::taylor_vortex(), 4096, 256, {4, 24, pinn::Activation::Celu}},
  };
  std::printf("threads %d, chunk %d\n", omp_get_max_threads(), chunk);
  std::printf("%-14s %8s %12s %12s %8s %s\n", "problem", "points", "serial_ms", "parallel_ms", "speedup", "identical");
  for (const Case& c : cases) {
    const auto sets = pinn::build_training_set(c.spec.geometry, c.n_int, c.n_b, c.n_b, pinn::RuleKind::Sobol, 1);
    const pinn::Model m(pinn::init_params(1, pinn::layer_dims_for(c.spec, c.arch), c.arch.activation),
                        pinn::InputMap::to_symmetric_cube(c.spec.geometry.space_time()));
    const pinn::LossConfig cfg{0.1, 2, 1e-6};
    const pinn::PinnLoss serial(c.spec, sets, cfg, {chunk, false});
    const pinn::PinnLoss parallel(c.spec, sets, cfg, {chunk, true});
    std::vector<double> gs(m.params.size()), gp(m.params.size());
    const double ts = seconds_per_eval(serial, m, gs, reps);
    const double tp = seconds_per_eval(parallel, m, gp, reps);
    const bool same = serial.evaluate(m).total == parallel.evaluate(m).total && gs == gp;
    std::printf("%-14s %8d %12.2f %12.2f %8.2f %s\n", c.name.c_str(), sets.n_int() + sets.n_sb() + sets.n_tb(),
                1e3 * ts, 1e3 * tp, ts / tp, same ? "yes" : "NO");
  }
  return 0;
}
