#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pinn/error_analysis.hpp"
#include "pinn/trainer.hpp"

namespace pinn {

/// One point of the hyperparameter grid.
struct HyperConfig {
  int depth = 4;
  int width = 20;
  int q = 2;
  double lambda_reg = 0.0;
  double lambda = 1.0;
};

/// Cross product over the five value lists. Enumeration order is depth,
/// width, q, lambda_reg, lambda with lambda varying fastest.
struct HyperGrid {
  std::vector<int> depths{4};
  std::vector<int> widths{20};
  std::vector<int> qs{2};
  std::vector<double> lambda_regs{0.0};
  std::vector<double> lambdas{1.0};

  std::size_t size() const;
  HyperConfig at(std::size_t index) const;
};

/// The 360-point heat grid: depth {2,4,8}, width {12,16,20}, q {1,2},
/// lambda_reg {0,1e-6,1e-5,1e-4,1e-3}, lambda {0.01,0.1,1,10}.
HyperGrid heat_table_grid();

struct EnsembleEntry {
  std::size_t index = 0;
  HyperConfig config;
  std::uint64_t seed = 0;
  int restart = 0;
  double train_error = 0.0;
  double gen_error = 0.0;
  double gen_error_rel = 0.0;
  double wall_time_s = 0.0;
  bool failed = false;
  std::string message;
};

struct EnsembleOptions {
  Activation activation = Activation::Tanh;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  int n_test = 100000;
  std::uint64_t test_seed = 99;
  /// Configurations trained concurrently; each run is then serial.
  int workers = 1;
};

/// Seed of configuration `index`.
constexpr std::uint64_t config_seed(std::uint64_t seed, std::size_t index) {
  return seed * 0x9e3779b97f4a7c15ull + 7919ull * index + 1;
}

/// Trains every configuration and scores it against `truth`. Failures are
/// recorded, not thrown. Completed entries come first, sorted by training
/// error (ties by index); failed entries follow in index order.
std::vector<EnsembleEntry> ensemble_search(const ProblemSpec& spec, const TrainingSet& sets,
                                           const HyperGrid& grid, const FieldEvaluator& truth,
                                           const EnsembleOptions& options);

/// Statistics of gen_error_rel over completed runs sharing one value of one
/// hyperparameter.
struct Marginal {
  std::string hyperparameter;
  double value = 0.0;
  int count = 0;
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
};

std::vector<Marginal> marginals(const std::vector<EnsembleEntry>& entries);

/// Pearson correlation of log10 train_error against log10 gen_error over
/// completed runs with positive errors. NaN with fewer than two runs.
double log_error_correlation(const std::vector<EnsembleEntry>& entries);

/// depth,width,q,lambda_reg,lambda,restart,train_error,gen_error_rel,wall_time_s
void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleEntry>& entries);
/// hyperparameter,value,count,min,q25,median,q75,max
void write_marginals_csv(std::ostream& out, const std::vector<Marginal>& m);
/// index,train_error,gen_error,gen_error_rel for every completed run
void write_scatter_csv(std::ostream& out, const std::vector<EnsembleEntry>& entries);

}  // namespace pinn
