#include "pinn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

#include "pinn/errors.hpp"

namespace pinn {

double combine(const LossBreakdown& b, const LossConfig& cfg) {
  return b.tb + b.sb + cfg.lambda * (b.interior + b.div) + cfg.lambda_reg * b.reg;
}

namespace {

// Column c of r weighted by w(c), summed over rows.
double weighted_sq(const Eigen::MatrixXd& r, const Eigen::VectorXd& w) {
  if (r.cols() == 0) return 0.0;
  return r.colwise().squaredNorm().dot(w);
}

}  // namespace

LossBreakdown breakdown_from_residuals(const ResidualBundle& r, const TrainingSet& sets,
                                       const LossConfig& cfg, int n_faces, double reg) {
  LossBreakdown b;
  b.tb = weighted_sq(r.temporal_boundary, sets.temporal_boundary.weights);
  b.interior = weighted_sq(r.interior, sets.interior.weights);
  if (r.divergence.size() > 0) b.div = weighted_sq(r.divergence, sets.interior.weights);
  b.sb_faces.assign(static_cast<std::size_t>(n_faces), 0.0);
  for (Eigen::Index c = 0; c < r.spatial_boundary.cols(); ++c) {
    const double v = sets.spatial_boundary.weights(c) * r.spatial_boundary.col(c).squaredNorm();
    b.sb += v;
    b.sb_faces[static_cast<std::size_t>(r.sb_labels[c])] += v;
  }
  b.reg = reg;
  b.total = combine(b, cfg);
  return b;
}

double weight_penalty(const NetworkParams& params, int q) {
  double s = 0.0;
  for (int k = 0; k < params.num_affine(); ++k) {
    const auto w = params.weight(k);
    s += q == 1 ? w.cwiseAbs().sum() : w.squaredNorm();
  }
  return s;
}

struct PinnLoss::Partial {
  double tb = 0.0, sb = 0.0, interior = 0.0, div = 0.0;
  std::vector<double> sb_faces;
  std::vector<double> grad;
};

PinnLoss::PinnLoss(const ProblemSpec& spec, const TrainingSet& sets, LossConfig cfg, EvalOptions options)
    : spec_(&spec), sets_(&sets), cfg_(cfg), options_(options), n_faces_(2 * spec.spatial_dim()) {
  if (cfg.q != 1 && cfg.q != 2) throw ConfigError("loss.q", "regularization exponent must be 1 or 2");
  if (cfg.lambda < 0.0 || cfg.lambda_reg < 0.0)
    throw ConfigError("loss", "lambda and lambda_reg must be non-negative");
  if (options_.chunk_size < 1) options_.chunk_size = 1;
  const int sizes[3] = {sets.n_int(), sets.n_sb(), sets.n_tb()};
  for (int s = 0; s < 3; ++s)
    for (int b = 0; b < sizes[s]; b += options_.chunk_size)
      chunks_.push_back({s, b, std::min(sizes[s], b + options_.chunk_size)});
}

void PinnLoss::run_chunk(const Model& model, const Chunk& c, Partial& out, bool want_grad) const {
  const ProblemSpec& spec = *spec_;
  const int n = c.end - c.begin;
  const QuadratureRule& rule =
      c.set == 0 ? sets_->interior : (c.set == 1 ? sets_->spatial_boundary : sets_->temporal_boundary);
  const Eigen::MatrixXd pts = rule.points.middleCols(c.begin, n);
  const Eigen::VectorXd w = rule.weights.segment(c.begin, n);
  out.sb_faces.assign(static_cast<std::size_t>(n_faces_), 0.0);
  if (want_grad) out.grad.assign(model.params.size(), 0.0);

  if (c.set == 0) {
    const ModelTape tape(model, pts, interior_request(spec));
    const Eigen::MatrixXd r = interior_residual(spec, pts, tape.outputs());
    const int drow = divergence_row(spec);
    const Eigen::RowVectorXd sq = r.colwise().squaredNorm();
    if (drow >= 0) {
      const Eigen::RowVectorXd dsq = r.row(drow).cwiseAbs2();
      out.div = dsq.dot(w);
      out.interior = (sq - dsq).dot(w);
    } else {
      out.interior = sq.dot(w);
    }
    if (want_grad) {
      const Eigen::MatrixXd rbar = r * (2.0 * cfg_.lambda * w).asDiagonal();
      JetBatch adj = JetBatch::zeros_like(tape.outputs());
      interior_pullback(spec, pts, tape.outputs(), rbar, adj);
      tape.backward(adj, out.grad);
    }
  } else if (c.set == 1) {
    const std::span<const int> labels(sets_->spatial_boundary.labels.data() + c.begin, static_cast<std::size_t>(n));
    const JetRequest req = boundary_request(spec);
    const ModelTape tape(model, pts, req);
    std::optional<ModelTape> partner;
    if (spec.boundary == BoundaryKind::Periodic)
      partner.emplace(model, sets_->sb_partner.middleCols(c.begin, n), req);
    const JetBatch* pj = partner ? &partner->outputs() : nullptr;
    const Eigen::MatrixXd r = boundary_residual(spec, pts, labels, tape.outputs(), pj);
    for (int k = 0; k < n; ++k) {
      const double v = w(k) * r.col(k).squaredNorm();
      out.sb += v;
      out.sb_faces[static_cast<std::size_t>(labels[k])] += v;
    }
    if (want_grad) {
      const Eigen::MatrixXd rbar = r * (2.0 * w).asDiagonal();
      JetBatch adj = JetBatch::zeros_like(tape.outputs());
      std::optional<JetBatch> padj;
      if (partner) padj = JetBatch::zeros_like(partner->outputs());
      boundary_pullback(spec, pts, labels, tape.outputs(), pj, rbar, adj, padj ? &*padj : nullptr);
      tape.backward(adj, out.grad);
      if (partner) partner->backward(*padj, out.grad);
    }
  } else {
    const ModelTape tape(model, pts, initial_request(spec));
    const Eigen::MatrixXd r = initial_residual(spec, pts, tape.outputs());
    out.tb = r.colwise().squaredNorm().dot(w);
    if (want_grad) {
      const Eigen::MatrixXd rbar = r * (2.0 * w).asDiagonal();
      JetBatch adj = JetBatch::zeros_like(tape.outputs());
      initial_pullback(spec, pts, tape.outputs(), rbar, adj);
      tape.backward(adj, out.grad);
    }
  }
}

LossBreakdown PinnLoss::evaluate(const Model& model, std::span<double> grad) const {
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != model.params.size())
    throw ShapeError("gradient buffer does not match the parameter count");
  std::vector<Partial> parts(chunks_.size());
  const int n_chunks = static_cast<int>(chunks_.size());
#pragma omp parallel for schedule(dynamic, 1) if (options_.parallel)
  for (int i = 0; i < n_chunks; ++i) run_chunk(model, chunks_[static_cast<std::size_t>(i)], parts[static_cast<std::size_t>(i)], want_grad);

  LossBreakdown b;
  b.sb_faces.assign(static_cast<std::size_t>(n_faces_), 0.0);
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  for (const Partial& p : parts) {
    b.tb += p.tb;
    b.sb += p.sb;
    b.interior += p.interior;
    b.div += p.div;
    for (std::size_t f = 0; f < b.sb_faces.size(); ++f) b.sb_faces[f] += p.sb_faces[f];
    if (want_grad)
      for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += p.grad[j];
  }
  b.reg = weight_penalty(model.params, cfg_.q);
  if (want_grad && cfg_.lambda_reg > 0.0) {
    const auto theta = model.params.flat();
    for (int k = 0; k < model.params.num_affine(); ++k) {
      const std::size_t lo = model.params.weight_offset(k), hi = model.params.bias_offset(k);
      for (std::size_t j = lo; j < hi; ++j) {
        const double t = theta[j];
        grad[j] += cfg_.lambda_reg * (cfg_.q == 1 ? (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0)) : 2.0 * t);
      }
    }
  }
  b.total = combine(b, cfg_);
  return b;
}

Objective PinnLoss::objective(Model& model) const {
  return [this, &model](std::span<const double> theta, std::span<double> grad) {
    std::copy(theta.begin(), theta.end(), model.params.flat().begin());
    return evaluate(model, grad).total;
  };
}

LossBreakdown assemble_loss(const Model& model, const ProblemSpec& spec, const TrainingSet& sets,
                            const LossConfig& cfg) {
  return PinnLoss(spec, sets, cfg).evaluate(model);
}

LossBreakdown assemble_loss(const JetSource& source, const ProblemSpec& spec, const TrainingSet& sets,
                            const LossConfig& cfg) {
  return breakdown_from_residuals(residuals(spec, source, sets), sets, cfg, 2 * spec.spatial_dim());
}

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::Lbfgs ? "lbfgs" : "adam"; }

OptimizerKind optimizer_from_string(std::string_view s) {
  if (s == "lbfgs" || s == "LBFGS") return OptimizerKind::Lbfgs;
  if (s == "adam" || s == "ADAM") return OptimizerKind::Adam;
  throw ConfigError("optimizer.choice", "unknown optimizer '" + std::string(s) + "'");
}

std::vector<int> layer_dims_for(const ProblemSpec& spec, const Architecture& arch) {
  if (arch.depth < 1 || arch.width < 1)
    throw ArchitectureError("depth and width must be positive");
  return make_layer_dims(spec.input_dim(), arch.depth, arch.width, spec.output_dim);
}

TrainOutcome train(const ProblemSpec& spec, const TrainingSet& sets, const Architecture& arch,
                   const LossConfig& cfg, const OptimizerConfig& opt, std::uint64_t seed, EvalOptions eval) {
  if (opt.restarts < 1) throw ConfigError("optimizer.restarts", "must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  const PinnLoss loss(spec, sets, cfg, eval);
  const InputMap input = InputMap::to_symmetric_cube(spec.geometry.space_time());
  const std::vector<int> dims = layer_dims_for(spec, arch);

  std::optional<TrainOutcome> best;
  std::vector<RestartRecord> records;
  for (int r = 0; r < opt.restarts; ++r) {
    RestartRecord rec;
    rec.index = r;
    rec.seed = restart_seed(seed, r);
    Model model(init_params(rec.seed, dims, arch.activation), input);
    const std::vector<double> theta0(model.params.flat().begin(), model.params.flat().end());
    try {
      OptimResult res;
      if (opt.kind == OptimizerKind::Lbfgs) {
        LbfgsOptions lo;
        lo.max_iters = opt.iters;
        lo.history = opt.history;
        lo.tolerance = opt.tolerance;
        lo.ftol = opt.ftol;
        res = lbfgs_run(loss.objective(model), theta0, lo);
      } else {
        AdamOptions ao;
        ao.steps = opt.iters;
        ao.learning_rate = opt.learning_rate;
        res = adam_run(loss.objective(model), theta0, ao);
      }
      std::copy(res.x.begin(), res.x.end(), model.params.flat().begin());
      rec.iterations = res.iterations;
      rec.line_search_failed = res.line_search_failed;
      rec.message = res.message;
      const LossBreakdown fb = loss.evaluate(model);
      rec.final_loss = fb.total;
      if (!std::isfinite(fb.total)) throw DivergenceError("non-finite final loss");
      if (!best || fb.total < best->final_breakdown.total) {
        best.emplace(TrainOutcome{.model = std::move(model),
                                  .loss_history = std::move(res.history),
                                  .final_breakdown = fb,
                                  .restart_index = r,
                                  .seed = rec.seed,
                                  .restarts = {},
                                  .wall_time_s = 0.0});
      }
    } catch (const DivergenceError& e) {
      rec.diverged = true;
      rec.final_loss = std::nan("");
      rec.message = e.what();
    }
    records.push_back(std::move(rec));
  }
  if (!best) {
    std::ostringstream os;
    os << "all " << opt.restarts << " restarts diverged:";
    for (const auto& rec : records) os << " [restart " << rec.index << " seed " << rec.seed << ": " << rec.message << "]";
    throw DivergenceError(os.str());
  }
  best->restarts = std::move(records);
  best->wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return std::move(*best);
}

}  // namespace pinn
