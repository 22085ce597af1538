#include "pinn/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pinn/errors.hpp"

namespace pinn {

namespace {

constexpr int kEvalChunk = 2048;

int chunk_count(Eigen::Index n) { return static_cast<int>((n + kEvalChunk - 1) / kEvalChunk); }

/// Evaluates `f` on column chunks in parallel and stitches the results.
Eigen::MatrixXd evaluate_chunked(const FieldEvaluator& f, const Eigen::MatrixXd& points) {
  const int n_chunks = chunk_count(points.cols());
  std::vector<Eigen::MatrixXd> parts(static_cast<std::size_t>(n_chunks));
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < n_chunks; ++c) {
    const Eigen::Index b = Eigen::Index(c) * kEvalChunk;
    const Eigen::Index len = std::min<Eigen::Index>(kEvalChunk, points.cols() - b);
    parts[static_cast<std::size_t>(c)] = f(points.middleCols(b, len));
  }
  if (n_chunks == 0) return f(points);
  Eigen::MatrixXd out(parts[0].rows(), points.cols());
  for (int c = 0; c < n_chunks; ++c)
    out.middleCols(Eigen::Index(c) * kEvalChunk, parts[static_cast<std::size_t>(c)].cols()) =
        parts[static_cast<std::size_t>(c)];
  return out;
}

/// Sup-norm statistics of a field over sampled points.
struct SupStats {
  double value = 0.0;      // max Euclidean norm of the first `rows` outputs
  double gradient = 0.0;   // max Euclidean norm of the (t, x) gradient, all outputs
  double max_entry = 0.0;  // max |d u_i / d x_j| over spatial j and i < rows
  double scalar = 0.0;     // max |output `scalar_row`|, if any
};

SupStats sup_stats(const JetSource& src, const Eigen::MatrixXd& points, int rows, int scalar_row = -1) {
  const int n_chunks = chunk_count(points.cols());
  std::vector<SupStats> parts(static_cast<std::size_t>(n_chunks));
  const int din = static_cast<int>(points.rows());
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < n_chunks; ++c) {
    const Eigen::Index b = Eigen::Index(c) * kEvalChunk;
    const Eigen::Index len = std::min<Eigen::Index>(kEvalChunk, points.cols() - b);
    const JetBatch jets = src.evaluate(points.middleCols(b, len), JetRequest::first_order());
    SupStats s;
    for (Eigen::Index n = 0; n < len; ++n) {
      s.value = std::max(s.value, jets.value.col(n).head(rows).norm());
      double g2 = 0.0;
      for (int j = 0; j < din; ++j) {
        g2 += jets.grad[j].col(n).head(rows).squaredNorm();
        if (j > 0)
          s.max_entry = std::max(s.max_entry, jets.grad[j].col(n).head(rows).cwiseAbs().maxCoeff());
      }
      s.gradient = std::max(s.gradient, std::sqrt(g2));
      if (scalar_row >= 0) s.scalar = std::max(s.scalar, std::abs(jets.value(scalar_row, n)));
    }
    parts[static_cast<std::size_t>(c)] = s;
  }
  SupStats out;
  for (const SupStats& s : parts) {
    out.value = std::max(out.value, s.value);
    out.gradient = std::max(out.gradient, s.gradient);
    out.max_entry = std::max(out.max_entry, s.max_entry);
    out.scalar = std::max(out.scalar, s.scalar);
  }
  return out;
}

Eigen::MatrixXd sample_box(const Box& box, int n, std::uint64_t seed) {
  return box.map_from_unit(uniform_random(n, box.dim(), seed));
}

/// Lateral boundary points, spread over faces by measure.
Eigen::MatrixXd sample_lateral(const Geometry& g, int n, std::uint64_t seed) {
  return build_training_set(g, 1, n, 1, RuleKind::MonteCarlo, seed).spatial_boundary.points;
}

double sq(double v) { return v * v; }

/// Per-point squared residual of each term, summed over residual rows.
std::array<Eigen::VectorXd, kTermCount> pointwise_squares(const ResidualBundle& r) {
  auto col_sq = [](const Eigen::MatrixXd& m) -> Eigen::VectorXd {
    if (m.size() == 0) return Eigen::VectorXd(0);
    return m.colwise().squaredNorm().transpose();
  };
  return {col_sq(r.temporal_boundary), col_sq(r.spatial_boundary), col_sq(r.interior), col_sq(r.divergence)};
}

std::array<const QuadratureRule*, kTermCount> term_rules(const TrainingSet& s) {
  return {&s.temporal_boundary, &s.spatial_boundary, &s.interior, &s.interior};
}

void check_finite_constants(BoundReport& r) {
  for (const auto& [name, v] : r.constants)
    if (!(v >= 0.0)) r.flags.push_back("constant " + name + " is not a finite non-negative number");
}

}  // namespace

FieldEvaluator field_of(const Model& model) {
  return [model](const Eigen::MatrixXd& pts) { return model.evaluate(pts); };
}

FieldEvaluator field_of(std::shared_ptr<const AnalyticField> field) {
  return [field = std::move(field)](const Eigen::MatrixXd& pts) { return field->values(pts); };
}

FieldEvaluator field_of(std::shared_ptr<const FvGrid> grid) {
  return [grid = std::move(grid)](const Eigen::MatrixXd& pts) -> Eigen::MatrixXd {
    return sample_reference(*grid, pts).transpose();
  };
}

TrainingErrorReport training_error(const LossBreakdown& b, const LossConfig& cfg, ProblemKind kind) {
  TrainingErrorReport r;
  r.kind = kind;
  r.e_tb = std::sqrt(b.tb);
  r.e_sb = std::sqrt(b.sb);
  r.e_int = std::sqrt(b.interior);
  r.e_div = std::sqrt(b.div);
  for (double f : b.sb_faces) r.e_sb_faces.push_back(std::sqrt(f));
  double total = 0.0;
  switch (kind) {
    case ProblemKind::Heat:
    case ProblemKind::ConservationLaw:
      total = b.tb + b.sb + cfg.lambda * b.interior;
      break;
    case ProblemKind::Euler:
      total = b.tb + b.sb + b.interior + cfg.lambda * b.div;
      break;
  }
  r.e_total = std::sqrt(total);
  return r;
}

GeneralizationReport generalization_error(const FieldEvaluator& candidate, const FieldEvaluator& truth,
                                          const Box& box, int n_test, std::uint64_t seed, int components) {
  if (n_test <= 0) throw EmptyRuleError("generalization_error: n_test must be positive");
  const Eigen::MatrixXd pts = sample_box(box, n_test, seed);
  const Eigen::MatrixXd c = evaluate_chunked(candidate, pts);
  const Eigen::MatrixXd t = evaluate_chunked(truth, pts);
  const int rows = components > 0 ? components : static_cast<int>(t.rows());
  if (c.rows() < rows || t.rows() < rows)
    throw ShapeError("generalization_error: evaluators return fewer rows than compared");
  const double diff = (c.topRows(rows) - t.topRows(rows)).squaredNorm() / n_test;
  const double norm = t.topRows(rows).squaredNorm() / n_test;
  GeneralizationReport r;
  r.e_g = std::sqrt(box.measure() * diff);
  r.truth_norm = std::sqrt(box.measure() * norm);
  r.e_g_rel = r.truth_norm > 0.0 ? 100.0 * r.e_g / r.truth_norm : std::numeric_limits<double>::infinity();
  r.n_test = n_test;
  r.seed = seed;
  return r;
}

std::string_view to_string(Term t) {
  switch (t) {
    case Term::Tb: return "tb";
    case Term::Sb: return "sb";
    case Term::Int: return "int";
    case Term::Div: return "div";
  }
  return "?";
}

ValidationReport validation_report(const ProblemSpec& spec, std::span<const JetSource* const> models,
                                   std::span<const TrainingSet> training,
                                   std::span<const TrainingSet> validation) {
  if (models.empty()) throw ConfigError("k_sets", "validation_report needs at least one trained model");
  if (training.size() != models.size())
    throw ShapeError("validation_report: one training set per model required");
  if (validation.empty()) throw ConfigError("validation", "validation_report needs a validation draw");

  ValidationReport rep;
  rep.k_sets = static_cast<int>(models.size());
  rep.draws = static_cast<int>(validation.size());
  rep.has_div = divergence_row(spec) >= 0;
  const double k = rep.k_sets;

  for (std::size_t m = 0; m < models.size(); ++m) {
    const ResidualBundle r = residuals(spec, *models[m], training[m]);
    const auto rules = term_rules(training[m]);
    const auto sq_pts = pointwise_squares(r);
    for (int t = 0; t < kTermCount; ++t) {
      if (sq_pts[t].size() == 0) continue;
      rep.e_train[t] += std::sqrt(sq_pts[t].dot(rules[t]->weights)) / k;
    }
  }
  const auto rules0 = term_rules(training[0]);
  for (int t = 0; t < kTermCount; ++t) rep.n_train[t] = rules0[t]->size();
  if (!rep.has_div) rep.n_train[static_cast<int>(Term::Div)] = 0;

  for (const TrainingSet& v : validation) {
    const auto rules = term_rules(v);
    std::array<Eigen::VectorXd, kTermCount> mean_sq;
    std::array<double, kTermCount> e_val{};
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto sq_pts = pointwise_squares(residuals(spec, *models[m], v));
      for (int t = 0; t < kTermCount; ++t) {
        if (sq_pts[t].size() == 0) continue;
        e_val[t] += std::sqrt(sq_pts[t].dot(rules[t]->weights)) / k;
        if (mean_sq[t].size() == 0) mean_sq[t] = Eigen::VectorXd::Zero(sq_pts[t].size());
        mean_sq[t] += sq_pts[t] / k;
      }
    }
    for (int t = 0; t < kTermCount; ++t) {
      rep.e_val[t] += e_val[t] / rep.draws;
      // Factored so equal errors give exactly zero under fused multiply-add.
      rep.gap[t] += std::abs((rep.e_train[t] - e_val[t]) * (rep.e_train[t] + e_val[t])) / rep.draws;
      const Eigen::VectorXd& z = mean_sq[t];
      if (z.size() > 1) {
        const double mean = z.mean();
        const double var = (z.array() - mean).square().sum() / static_cast<double>(z.size() - 1);
        rep.residual_std[t] += rules[t]->total_weight() * std::sqrt(var) / rep.draws;
      }
    }
  }
  for (double& g : rep.gap) g = std::sqrt(g);
  return rep;
}

ValidationReport validation_report(const ProblemSpec& spec, std::span<const Model> models,
                                   std::span<const TrainingSet> training,
                                   std::span<const TrainingSet> validation) {
  std::vector<ModelSource> sources;
  sources.reserve(models.size());
  for (const Model& m : models) sources.emplace_back(m);
  std::vector<const JetSource*> ptrs;
  for (const ModelSource& s : sources) ptrs.push_back(&s);
  return validation_report(spec, std::span<const JetSource* const>(ptrs), training, validation);
}

double BoundReport::constant(std::string_view name) const {
  for (const auto& [k, v] : constants)
    if (k == name) return v;
  throw std::out_of_range("no constant named " + std::string(name));
}

double BoundReport::term(std::string_view name) const {
  for (const auto& [k, v] : terms)
    if (k == name) return v;
  throw std::out_of_range("no term named " + std::string(name));
}

double bound_from_terms(const std::vector<std::pair<std::string, double>>& terms) {
  double s = 0.0;
  for (const auto& kv : terms) s += kv.second;
  return std::sqrt(s);
}

double heat_c1(double c_f, double t_final) {
  const double a = 1.0 + 2.0 * c_f;
  return std::sqrt(t_final + a * t_final * t_final * std::exp(a * t_final));
}

namespace {

/// C_dD from sampled C1 norms (sup |u| + sup |grad u|) on the lateral boundary.
double heat_boundary_constant(const ProblemSpec& spec, std::span<const JetSource* const> models,
                              const AnalyticField& exact, const SupNormSampling& sampling,
                              std::vector<std::pair<std::string, double>>& diag) {
  const Eigen::MatrixXd pts = sample_lateral(spec.geometry, sampling.n_boundary, sampling.seed);
  const SupStats u = sup_stats(exact, pts, 1);
  double net = 0.0;
  for (const JetSource* m : models) {
    const SupStats s = sup_stats(*m, pts, 1);
    net = std::max(net, s.value + s.gradient);
  }
  diag.emplace_back("exact_C1_boundary", u.value + u.gradient);
  diag.emplace_back("network_C1_boundary", net);
  return std::sqrt(spec.geometry.space.boundary_measure()) * (u.value + u.gradient + net);
}

void require_heat(const ProblemSpec& spec, const char* who) {
  if (spec.kind != ProblemKind::Heat) throw ConfigError("problem", std::string(who) + " needs a heat problem");
}

}  // namespace

BoundReport heat_bound(const ProblemSpec& spec, std::span<const Model> models,
                       std::span<const TrainingSet> training, const ValidationReport& validation,
                       const AnalyticField& exact, double measured_e_g, const SupNormSampling& sampling) {
  require_heat(spec, "heat_bound");
  if (models.empty()) throw ConfigError("k_sets", "heat_bound needs at least one trained model");
  for (const TrainingSet& s : training)
    for (const QuadratureRule* r : {&s.interior, &s.spatial_boundary, &s.temporal_boundary})
      if (r->kind != RuleKind::MonteCarlo)
        throw DomainError("heat_bound: the random-points bound needs Monte Carlo training sets, got " +
                          std::string(to_string(r->kind)));

  BoundReport rep;
  rep.family = "heat";
  rep.form = "random points";
  rep.measured_e_g = measured_e_g;
  const double T = spec.geometry.t_final;
  const double c_f = spec.source.lipschitz;
  const double c1 = heat_c1(c_f, T);

  std::vector<ModelSource> sources(models.begin(), models.end());
  std::vector<const JetSource*> ptrs;
  for (const ModelSource& s : sources) ptrs.push_back(&s);
  const double c_dd = heat_boundary_constant(spec, ptrs, exact, sampling, rep.diagnostics);
  const double c2 = std::sqrt(c_dd * std::sqrt(T));
  rep.constants = {{"C_f", c_f}, {"C1", c1}, {"C_dD", c_dd}, {"C2", c2}};

  const auto& v = validation;
  const int tb = static_cast<int>(Term::Tb), sb = static_cast<int>(Term::Sb), in = static_cast<int>(Term::Int);
  const double c1s = c1 * c1, c2s = c2 * c2;
  rep.terms = {
      {"train_tb", c1s * sq(v.e_train[tb])},
      {"gap_tb", c1s * sq(v.gap[tb])},
      {"train_int", c1s * sq(v.e_train[in])},
      {"gap_int", c1s * sq(v.gap[in])},
      {"train_sb", c1s * c2s * v.e_train[sb]},
      {"gap_sb", c1s * c2s * v.gap[sb]},
      {"std_tb", c1s * v.residual_std[tb] / std::sqrt(double(v.n_train[tb]))},
      {"std_int", c1s * v.residual_std[in] / std::sqrt(double(v.n_train[in]))},
      {"std_sb", c1s * c2s * std::sqrt(v.residual_std[sb]) / std::pow(double(v.n_train[sb]), 0.25)},
  };
  rep.bound_total = bound_from_terms(rep.terms);
  check_finite_constants(rep);
  return rep;
}

BoundReport heat_training_bound(const ProblemSpec& spec, const Model& model, const TrainingSet& sets,
                                const AnalyticField& exact, double measured_e_g,
                                const SupNormSampling& sampling) {
  require_heat(spec, "heat_training_bound");
  BoundReport rep;
  rep.family = "heat";
  rep.form = "training-error part";
  rep.measured_e_g = measured_e_g;
  const double T = spec.geometry.t_final;
  const double c_f = spec.source.lipschitz;
  const double c1 = heat_c1(c_f, T);
  const ModelSource src(model);
  const JetSource* ptr = &src;
  const double c_dd = heat_boundary_constant(spec, std::span<const JetSource* const>(&ptr, 1), exact,
                                             sampling, rep.diagnostics);
  const double c2 = std::sqrt(c_dd * std::sqrt(T));
  rep.constants = {{"C_f", c_f}, {"C1", c1}, {"C_dD", c_dd}, {"C2", c2}};
  const LossBreakdown b = assemble_loss(src, spec, sets, LossConfig{});
  rep.terms = {{"train_tb", c1 * c1 * b.tb},
               {"train_int", c1 * c1 * b.interior},
               {"train_sb", c1 * c1 * c2 * c2 * std::sqrt(b.sb)}};
  rep.bound_total = bound_from_terms(rep.terms);
  rep.flags.push_back("quadrature terms omitted");
  check_finite_constants(rep);
  return rep;
}

ScalarTruth scalar_truth(std::shared_ptr<const FvGrid> grid) {
  ScalarTruth t;
  t.value = field_of(grid);
  t.dx = [grid](const Eigen::MatrixXd& pts) -> Eigen::MatrixXd {
    Eigen::MatrixXd lo = pts, hi = pts;
    for (Eigen::Index n = 0; n < pts.cols(); ++n) {
      lo(1, n) = std::max(grid->x_lo, pts(1, n) - grid->dx);
      hi(1, n) = std::min(grid->x_hi, pts(1, n) + grid->dx);
    }
    const Eigen::VectorXd d = sample_reference(*grid, hi) - sample_reference(*grid, lo);
    const Eigen::VectorXd h = (hi.row(1) - lo.row(1)).transpose();
    return (d.array() / h.array()).matrix().transpose();
  };
  return t;
}

ScalarTruth scalar_truth(std::shared_ptr<const AnalyticField> field) {
  ScalarTruth t;
  t.value = field_of(field);
  t.dx = [field](const Eigen::MatrixXd& pts) -> Eigen::MatrixXd {
    return field->evaluate(pts, JetRequest::first_order()).grad[1];
  };
  return t;
}

BoundReport burgers_bound(const ProblemSpec& spec, const Model& model, const TrainingSet& sets,
                          const ScalarTruth& truth, double measured_e_g, const SupNormSampling& sampling) {
  if (spec.kind != ProblemKind::ConservationLaw || !spec.flux)
    throw ConfigError("problem", "burgers_bound needs a scalar conservation law");
  const FluxSpec& f = *spec.flux;
  BoundReport rep;
  rep.family = "conservation law";
  rep.form = "training-error part";
  rep.measured_e_g = measured_e_g;
  const double T = spec.geometry.t_final;
  const double nu = spec.nu;
  const Box st = spec.geometry.space_time();

  const Eigen::MatrixXd pts = sample_box(st, sampling.n_interior, sampling.seed);
  const Eigen::MatrixXd u_vals = evaluate_chunked(truth.value, pts);
  const Eigen::MatrixXd u_dx = evaluate_chunked(truth.dx, pts);
  const double u_sup = u_vals.cwiseAbs().maxCoeff();
  const double ux_sup = u_dx.cwiseAbs().maxCoeff();
  const ModelSource src(model);
  const SupStats net = sup_stats(src, pts, 1);
  // |u*_x| is the spatial entry of the network gradient.
  const double net_ux = net.max_entry;
  const double u_max = std::max(u_sup, net.value);

  const double c_fuu = std::abs(f.f_second(u_max)) * ux_sup;
  const double C = 1.0 + 2.0 * c_fuu;
  const double c_b = ux_sup + net_ux;
  // Largest flux speed over the attained range, on a fine grid of states.
  double c_bar = 0.0;
  for (int i = 0; i <= 1000; ++i) c_bar = std::max(c_bar, std::abs(f.f_prime(-u_max + 2.0 * u_max * i / 1000.0)));
  rep.constants = {{"C_fuu", c_fuu}, {"C", C}, {"C_b", c_b}, {"Cbar_b", c_bar}};

  const LossBreakdown b = assemble_loss(src, spec, sets, LossConfig{});
  const double sb0 = b.sb_faces.size() > 0 ? b.sb_faces[0] : 0.0;
  const double sb1 = b.sb_faces.size() > 1 ? b.sb_faces[1] : 0.0;
  const double G = T + C * T * T * std::exp(C * T);
  rep.constants.emplace_back("G", G);
  rep.terms = {{"train_tb", G * b.tb},
               {"train_int", G * b.interior},
               {"train_sb", G * 2.0 * c_bar * (sb0 + sb1)},
               // Absent without viscosity, even when G overflows.
               {"viscous_sb", nu == 0.0 ? 0.0 : G * 2.0 * nu * c_b * std::sqrt(T) * (std::sqrt(sb0) + std::sqrt(sb1))}};
  rep.bound_total = bound_from_terms(rep.terms);
  rep.flags.push_back("quadrature terms omitted");

  // Final-time slice: gradient growth and jump detection.
  const int n_slice = 2001;
  const Box& space = spec.geometry.space;
  Eigen::MatrixXd slice(2, n_slice);
  for (int i = 0; i < n_slice; ++i) {
    slice(0, i) = T;
    slice(1, i) = space.lo[0] + space.extent(0) * i / (n_slice - 1);
  }
  const Eigen::VectorXd u_T = truth.value(slice).row(0).transpose();
  const Eigen::VectorXd ux_T = truth.dx(slice).row(0).transpose();
  double jump = 0.0;
  for (int i = 1; i < n_slice; ++i) jump = std::max(jump, std::abs(u_T(i) - u_T(i - 1)));
  const double range = u_T.maxCoeff() - u_T.minCoeff();
  rep.diagnostics = {{"ux_sup", ux_sup},
                     {"network_ux_sup", net_ux},
                     {"u_sup", u_sup},
                     {"ux_sup_final_time", ux_T.cwiseAbs().maxCoeff()},
                     {"largest_jump_final_time", jump}};
  if (nu == 0.0 && range > 0.0 && jump > 0.1 * range)
    rep.flags.push_back("constants unreliable: ||u_x||_inf diverges");
  check_finite_constants(rep);
  return rep;
}

BoundReport euler_bound(const ProblemSpec& spec, const Model& model, const TrainingSet& sets,
                        const AnalyticField& truth, double measured_e_g, const SupNormSampling& sampling) {
  if (spec.kind != ProblemKind::Euler) throw ConfigError("problem", "euler_bound needs an Euler problem");
  BoundReport rep;
  rep.family = "euler";
  rep.form = "training-error part";
  rep.measured_e_g = measured_e_g;
  const int d = spec.spatial_dim();
  const double T = spec.geometry.t_final;
  const Eigen::MatrixXd pts = sample_box(spec.geometry.space_time(), sampling.n_interior, sampling.seed);
  const SupStats u = sup_stats(truth, pts, d, d);
  const ModelSource src(model);
  const SupStats net = sup_stats(src, pts, d, d);

  const double c_inf = 1.0 + 2.0 * d * u.max_entry;
  const Box& D = spec.geometry.space;
  const double measure = std::max(D.measure(), D.boundary_measure());
  const double c0 = 2.0 * std::sqrt(measure) * (0.5 * sq(u.value + net.value) + u.scalar + net.scalar);
  const double G = T + c_inf * T * T * std::exp(c_inf * T);
  rep.constants = {{"C_d", double(d)}, {"C_inf", c_inf}, {"C0", c0}, {"G", G}};

  const LossBreakdown b = assemble_loss(src, spec, sets, LossConfig{});
  rep.terms = {{"train_tb", G * b.tb},
               {"train_u", G * b.interior},
               {"train_div", G * c0 * std::sqrt(T) * std::sqrt(b.div)},
               {"train_sb", G * c0 * std::sqrt(T) * std::sqrt(b.sb)}};
  rep.bound_total = bound_from_terms(rep.terms);
  rep.flags.push_back("quadrature terms omitted");
  rep.diagnostics = {{"grad_u_sup", u.max_entry},
                     {"u_sup", u.value},
                     {"network_u_sup", net.value},
                     {"p_sup", u.scalar},
                     {"network_p_sup", net.scalar}};
  check_finite_constants(rep);
  return rep;
}

Eigen::VectorXd vorticity_field(const JetSource& field, const Eigen::MatrixXd& points) {
  if (field.input_dim() != 3 || field.output_dim() < 2)
    throw UnsupportedDimensionError("vorticity_field needs a 2D velocity field over (t, x, y)");
  const int n_chunks = chunk_count(points.cols());
  Eigen::VectorXd out(points.cols());
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < n_chunks; ++c) {
    const Eigen::Index b = Eigen::Index(c) * kEvalChunk;
    const Eigen::Index len = std::min<Eigen::Index>(kEvalChunk, points.cols() - b);
    const JetBatch j = field.evaluate(points.middleCols(b, len), JetRequest::first_order());
    out.segment(b, len) = (j.grad[1].row(1) - j.grad[2].row(0)).transpose();
  }
  return out;
}

nlohmann::json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

nlohmann::json pairs_json(const std::vector<std::pair<std::string, double>>& kv) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : kv) j[k] = json_number(v);
  return j;
}

nlohmann::json array_json(std::span<const double> v) {
  nlohmann::json j = nlohmann::json::array();
  for (double x : v) j.push_back(json_number(x));
  return j;
}

std::string_view kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::Heat: return "heat";
    case ProblemKind::ConservationLaw: return "conservation law";
    case ProblemKind::Euler: return "euler";
  }
  return "?";
}

}  // namespace

nlohmann::json to_json(const TrainingErrorReport& r) {
  nlohmann::json j;
  j["kind"] = kind_name(r.kind);
  j["e_tb"] = json_number(r.e_tb);
  j["e_sb"] = json_number(r.e_sb);
  j["e_int"] = json_number(r.e_int);
  if (r.kind == ProblemKind::Euler) j["e_div"] = json_number(r.e_div);
  j["e_sb_faces"] = array_json(r.e_sb_faces);
  j["e_total"] = json_number(r.e_total);
  return j;
}

nlohmann::json to_json(const GeneralizationReport& r) {
  return {{"e_g", json_number(r.e_g)},
          {"e_g_rel", json_number(r.e_g_rel)},
          {"truth_norm", json_number(r.truth_norm)},
          {"n_test", r.n_test},
          {"seed", r.seed}};
}

nlohmann::json to_json(const ValidationReport& r) {
  nlohmann::json j;
  j["k_sets"] = r.k_sets;
  j["draws"] = r.draws;
  const int n = r.has_div ? kTermCount : kTermCount - 1;
  for (int t = 0; t < n; ++t) {
    const std::string name(to_string(static_cast<Term>(t)));
    j[name] = {{"e_train", json_number(r.e_train[t])},
               {"e_val", json_number(r.e_val[t])},
               {"gap", json_number(r.gap[t])},
               {"residual_std", json_number(r.residual_std[t])},
               {"n_train", r.n_train[t]}};
  }
  return j;
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"family", r.family},
          {"form", r.form},
          {"constants", pairs_json(r.constants)},
          {"terms", pairs_json(r.terms)},
          {"bound_total", json_number(r.bound_total)},
          {"measured_e_g", json_number(r.measured_e_g)},
          {"diagnostics", pairs_json(r.diagnostics)},
          {"flags", r.flags}};
}

}  // namespace pinn
