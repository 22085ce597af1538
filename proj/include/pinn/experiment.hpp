#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "pinn/ensemble.hpp"
#include "pinn/error_analysis.hpp"
#include "pinn/trainer.hpp"

namespace pinn {

/// Problem identifier plus the parameters the presets take.
struct ProblemConfig {
  /// heat_1d, heat_nd, burgers_sine, burgers_rarefaction, taylor_vortex,
  /// double_shear_layer
  std::string id = "heat_1d";
  double nu = 0.0;
  int n = 1;
  double a_x = 4.0, a_y = 0.0;
  /// Double shear layer: velocity file, or a generated grid of grid_n^2 points.
  std::string grid_file;
  int grid_n = 64;
  double rho = 30.0, delta = 0.05;
  double t_final = 1.0;
};

struct SamplingConfig {
  RuleKind kind = RuleKind::Sobol;
  int n_int = 1024, n_sb = 64, n_tb = 64;
  /// Independent training draws, one trained network each.
  int k_sets = 1;
};

struct EvaluationConfig {
  int n_test = 100000;
  std::uint64_t test_seed = 99;
  /// Validation draws for the random-points bound.
  int validation_draws = 1;
  /// Finite-volume cells of the conservation-law reference.
  int reference_cells = 2048;
  bool bound = true;
  SupNormSampling sup;
};

struct ConvergenceConfig {
  std::vector<int> n_int;
  std::vector<int> n_b;  // N_sb = N_tb
};

struct SnapshotConfig {
  std::vector<double> times;
  int resolution = 101;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  ProblemConfig problem;
  SamplingConfig sampling;
  Architecture architecture;
  LossConfig loss;
  OptimizerConfig optimizer;
  EvaluationConfig evaluation;
  ConvergenceConfig convergence;
  HyperGrid ensemble;
  SnapshotConfig snapshots;
  int workers = 1;
};

/// Parses a configuration object. When `scale` is non-empty and the object has
/// scales.<scale>, that object is merge-patched over the rest first. Throws
/// ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& scale = "");
ExperimentConfig load_config(const std::filesystem::path& path, const std::string& scale = "");
nlohmann::json to_json(const ExperimentConfig& c);

ProblemConfig parse_problem(const nlohmann::json& j, const std::string& path = "problem");
nlohmann::json to_json(const ProblemConfig& p);
ProblemSpec make_problem(const ProblemConfig& p);

/// Seed of training draw `k`.
constexpr std::uint64_t draw_seed(std::uint64_t seed, int k) { return seed + 7727ull * static_cast<std::uint64_t>(k); }

struct SetResult {
  TrainOutcome outcome;
  TrainingErrorReport train;
  std::optional<GeneralizationReport> gen;
  TrainingSet sets;
};

struct RunResult {
  std::vector<SetResult> sets;
  /// Averages over the training draws.
  double e_t_bar = 0.0;
  std::optional<double> e_g_bar, e_g_rel_bar;
  std::optional<ValidationReport> validation;
  std::optional<BoundReport> bound;
  /// Deterministic summary; wall times are written separately.
  nlohmann::json summary;
};

/// Trains, evaluates and bounds one configuration. With a non-empty `out`
/// writes summary.json, timing.json, results.csv, loss_history.csv and
/// checkpoint.json there.
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out = {});

struct ConvergenceRow {
  int n_int = 0, n_b = 0;
  double e_t_bar = 0.0;
  /// sqrt of the summed squared validation gaps over tb, sb, int
  double gap = 0.0;
  /// Sum of the three std contributions to the squared bound.
  double std_terms = 0.0;
  double bound_total = 0.0;
  double e_g_bar = 0.0;
  BoundReport bound;
};

/// Heat problems with Monte Carlo sampling only. Writes convergence.csv and
/// convergence.json when `out` is non-empty.
std::vector<ConvergenceRow> run_convergence_study(const ExperimentConfig& cfg,
                                                  const std::filesystem::path& out = {});

struct EnsembleRun {
  std::vector<EnsembleEntry> entries;
  std::vector<Marginal> marginals;
  double log_correlation = 0.0;
};

/// Writes ensemble.csv, marginals.csv, scatter.csv and ensemble.json.
EnsembleRun run_ensemble(const ExperimentConfig& cfg, const std::filesystem::path& out = {});

/// One CSV per time: x,u for one space dimension; x,y,<outputs>[,omega] on a
/// resolution^2 grid otherwise (further coordinates at the box centre).
/// Throws DomainError for t outside [0, T].
std::vector<std::filesystem::path> emit_snapshots(const std::filesystem::path& checkpoint,
                                                  std::span<const double> times, int resolution,
                                                  const std::filesystem::path& out);

/// Reference solution used for scoring, or empty when none exists.
std::optional<FieldEvaluator> reference_field(const ProblemSpec& spec, const ProblemConfig& p,
                                              const EvaluationConfig& e);

}  // namespace pinn
