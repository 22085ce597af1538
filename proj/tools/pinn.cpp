#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pinn/errors.hpp"
#include "pinn/experiment.hpp"
#include "pinn/runtime.hpp"
#include "verify.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kDivergence = 3 };

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string scale = "desk";
  std::optional<int> workers;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "experiment configuration (JSON)")->check(CLI::ExistingFile);
  if (needs_config) opt->required();
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "override the configured seed");
  cmd->add_option("--scale", c.scale, "preset scale")->check(CLI::IsMember({"paper", "desk"}))->capture_default_str();
  cmd->add_option("--workers", c.workers, "concurrent training runs")->check(CLI::PositiveNumber);
}

pinn::ExperimentConfig load(const Common& c) {
  pinn::ExperimentConfig cfg = pinn::load_config(c.config, c.scale);
  if (c.seed) cfg.seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  return cfg;
}

void print_run(const pinn::RunResult& r) {
  std::printf("e_t_bar      %.6g\n", r.e_t_bar);
  if (r.e_g_bar) std::printf("e_g_bar      %.6g\n", *r.e_g_bar);
  if (r.e_g_rel_bar) std::printf("e_g_rel_bar  %.4g%%\n", *r.e_g_rel_bar);
  if (r.bound) std::printf("bound        %.6g  (%s)\n", r.bound->bound_total, r.bound->form.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  pinn::keep_freed_heap();
  CLI::App app{"Physics-informed network experiments"};
  app.require_subcommand(1);

  Common common;
  auto* run = app.add_subcommand("run", "train, evaluate and bound one configuration");
  add_common(run, common, true);
  auto* converge = app.add_subcommand("converge", "error and bound against the number of training points");
  add_common(converge, common, true);
  auto* ensemble = app.add_subcommand("ensemble", "hyperparameter ensemble with marginals and scatter data");
  add_common(ensemble, common, true);

  auto* snapshots = app.add_subcommand("snapshots", "field values on a grid at chosen times");
  add_common(snapshots, common, false);
  std::string checkpoint;
  std::vector<double> times;
  std::optional<int> resolution;
  snapshots->add_option("--checkpoint", checkpoint, "checkpoint written by run")->required()->check(CLI::ExistingFile);
  snapshots->add_option("--times", times, "times to sample (default: from --config)")->delimiter(',');
  snapshots->add_option("--resolution", resolution, "grid points per axis")->check(CLI::PositiveNumber);

  app.add_subcommand("verify", "run the invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      const pinn::RunResult r = pinn::run_experiment(load(common), common.out);
      print_run(r);
    } else if (*converge) {
      const auto rows = pinn::run_convergence_study(load(common), common.out);
      std::printf("%8s %6s %12s %12s %12s\n", "N_int", "N_b", "e_t_bar", "bound", "e_g_bar");
      for (const auto& r : rows)
        std::printf("%8d %6d %12.5g %12.5g %12.5g\n", r.n_int, r.n_b, r.e_t_bar, r.bound_total, r.e_g_bar);
    } else if (*ensemble) {
      const pinn::EnsembleRun e = pinn::run_ensemble(load(common), common.out);
      std::size_t done = 0;
      for (const auto& x : e.entries) done += !x.failed;
      std::printf("configurations %zu, completed %zu, log-error correlation %.3f\n", e.entries.size(), done,
                  e.log_correlation);
    } else if (*snapshots) {
      int res = 101;
      if (!common.config.empty()) {
        const pinn::ExperimentConfig cfg = load(common);
        if (times.empty()) times = cfg.snapshots.times;
        res = cfg.snapshots.resolution;
      }
      if (resolution) res = *resolution;
      if (times.empty()) throw pinn::ConfigError("snapshots.times", "no snapshot times given");
      for (const auto& p : pinn::emit_snapshots(checkpoint, times, res, common.out))
        std::printf("%s\n", p.string().c_str());
    } else {
      return pinn::cli::run_invariant_suite(std::cout) ? kOk : kFailure;
    }
  } catch (const pinn::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const pinn::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  } catch (const pinn::DivergenceError& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return kDivergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
