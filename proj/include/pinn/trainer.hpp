#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinn/model.hpp"
#include "pinn/optim.hpp"
#include "pinn/problem.hpp"
#include "pinn/quadrature.hpp"

namespace pinn {

/// Loss weights. Residuals always enter squared.
struct LossConfig {
  /// Weight of the interior (and divergence) residual sums.
  double lambda = 1.0;
  /// Exponent of the weight penalty sum |W|^q, 1 or 2.
  int q = 2;
  double lambda_reg = 0.0;
  static constexpr int p = 2;
};

/// Weighted squared-residual sums, before lambda scaling.
struct LossBreakdown {
  double tb = 0.0;
  double sb = 0.0;
  double interior = 0.0;
  /// Euler only.
  double div = 0.0;
  /// sum over weight-matrix entries of |W|^q
  double reg = 0.0;
  double total = 0.0;
  /// sb split by boundary face label (2*axis + side).
  std::vector<double> sb_faces;
};

/// total = tb + sb + lambda (interior + div) + lambda_reg reg
double combine(const LossBreakdown& b, const LossConfig& cfg);

/// Breakdown from precomputed residuals; `reg` is the weight penalty sum.
LossBreakdown breakdown_from_residuals(const ResidualBundle& r, const TrainingSet& sets,
                                       const LossConfig& cfg, int n_faces, double reg = 0.0);

/// sum over weight-matrix entries of |W|^q
double weight_penalty(const NetworkParams& params, int q);

struct EvalOptions {
  /// Collocation points per work item.
  int chunk_size = 256;
  /// false runs the same chunks in order on the calling thread.
  bool parallel = true;
};

/// Loss and gradient over a fixed training set. Points are cut into chunks;
/// chunk results are reduced in chunk order so the value does not depend on
/// the number of threads.
class PinnLoss {
 public:
  PinnLoss(const ProblemSpec& spec, const TrainingSet& sets, LossConfig cfg, EvalOptions options = {});

  /// Fills `grad` (size = parameter count) when non-empty.
  LossBreakdown evaluate(const Model& model, std::span<double> grad = {}) const;
  /// Objective over the flat parameters of `model`, which it overwrites.
  Objective objective(Model& model) const;

  const LossConfig& config() const noexcept { return cfg_; }
  int faces() const noexcept { return n_faces_; }

 private:
  struct Chunk {
    int set;  // 0 interior, 1 spatial boundary, 2 temporal boundary
    int begin, end;
  };
  struct Partial;
  void run_chunk(const Model& model, const Chunk& c, Partial& out, bool want_grad) const;

  const ProblemSpec* spec_;
  const TrainingSet* sets_;
  LossConfig cfg_;
  EvalOptions options_;
  int n_faces_;
  std::vector<Chunk> chunks_;
};

LossBreakdown assemble_loss(const Model& model, const ProblemSpec& spec, const TrainingSet& sets,
                            const LossConfig& cfg);
/// Frozen evaluator such as an exact solution; no regularization term.
LossBreakdown assemble_loss(const JetSource& source, const ProblemSpec& spec, const TrainingSet& sets,
                            const LossConfig& cfg);

enum class OptimizerKind { Lbfgs, Adam };
std::string_view to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(std::string_view s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Lbfgs;
  int iters = 1000;
  int restarts = 1;
  double learning_rate = 1e-3;  // Adam
  int history = 50;             // LBFGS
  double tolerance = 1e-10;     // LBFGS gradient norm
  double ftol = 0.0;            // LBFGS relative decrease
};

struct Architecture {
  int depth = 4;  // hidden layers
  int width = 20;
  Activation activation = Activation::Tanh;
};

std::vector<int> layer_dims_for(const ProblemSpec& spec, const Architecture& arch);

struct RestartRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  int iterations = 0;
  bool diverged = false;
  bool line_search_failed = false;
  std::string message;
};

struct TrainOutcome {
  Model model;
  std::vector<double> loss_history;
  LossBreakdown final_breakdown;
  int restart_index = 0;
  std::uint64_t seed = 0;
  std::vector<RestartRecord> restarts;
  double wall_time_s = 0.0;
};

/// Initialization seed of restart r.
constexpr std::uint64_t restart_seed(std::uint64_t seed, int r) {
  return seed + 1000003ull * static_cast<std::uint64_t>(r);
}

/// Trains opt.restarts independently initialized networks and keeps the one
/// with the smallest final loss. Throws DivergenceError if all diverge.
TrainOutcome train(const ProblemSpec& spec, const TrainingSet& sets, const Architecture& arch,
                   const LossConfig& cfg, const OptimizerConfig& opt, std::uint64_t seed,
                   EvalOptions eval = {});

}  // namespace pinn
