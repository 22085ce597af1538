#include "pinn/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <exception>
#include <set>
#include <sstream>

#include <omp.h>

#include "pinn/errors.hpp"
#include "pinn/fv.hpp"
#include "pinn/rng.hpp"

namespace pinn {

using nlohmann::json;

namespace {

/// Typed access to one JSON object with field paths in every error.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const char* key) const { return j_.contains(key); }

  /// Rejects keys outside `allowed` so typos do not pass silently.
  void only(std::initializer_list<const char*> allowed) const {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j_.items())
      if (!ok.count(k)) throw ConfigError(path_.empty() ? k : path_ + "." + k, "unknown field");
  }

  Reader child(const char* key) const {
    static const json empty = json::object();
    return has(key) ? Reader(j_.at(key), at(key)) : Reader(empty, at(key));
  }

  int integer(const char* key, int def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<int>();
  }
  int positive(const char* key, int def) const {
    const int v = integer(key, def);
    if (v <= 0) throw ConfigError(at(key), "must be positive");
    return v;
  }
  std::uint64_t seed(const char* key, std::uint64_t def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw ConfigError(at(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  double number(const char* key, double def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(at(key), "must be finite");
    return d;
  }
  double non_negative(const char* key, double def) const {
    const double v = number(key, def);
    if (v < 0.0) throw ConfigError(at(key), "must be non-negative");
    return v;
  }
  std::string string(const char* key, std::string def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }
  bool boolean(const char* key, bool def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v.get<bool>();
  }
  template <class T>
  std::vector<T> list(const char* key, std::vector<T> def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(at(key), "expected a non-empty array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = at(key) + "[" + std::to_string(i) + "]";
      if constexpr (std::is_integral_v<T>) {
        if (!v[i].is_number_integer()) throw ConfigError(p, "expected an integer");
      } else {
        if (!v[i].is_number()) throw ConfigError(p, "expected a number");
      }
      out.push_back(v[i].get<T>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

/// Runs `f`, re-raising name-conversion failures at `path`.
template <class F>
auto converted(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  if (!out) throw ConfigError(p.string(), "cannot write output file");
  out << content;
}

json optional_json(const std::optional<double>& v) { return v ? json_number(*v) : json(nullptr); }

/// Reference for scoring and, for scalar laws, the finite-volume grid behind it.
struct Reference {
  std::optional<FieldEvaluator> field;
  std::shared_ptr<const FvGrid> grid;
};

Reference build_reference(const ProblemSpec& spec, const EvaluationConfig& e) {
  Reference r;
  if (spec.kind == ProblemKind::ConservationLaw) {
    r.grid = std::make_shared<const FvGrid>(fv_solve(spec, e.reference_cells, spec.geometry.t_final, kReferenceCfl));
    r.field = field_of(r.grid);
  } else if (spec.exact) {
    r.field = field_of(spec.exact);
  }
  return r;
}

std::uint64_t validation_seed(std::uint64_t seed, int d) {
  return splitmix64(seed ^ 0x76616c6964ull) + static_cast<std::uint64_t>(d);
}

EnsembleEntry results_row(const ExperimentConfig& cfg, const SetResult& s) {
  EnsembleEntry e;
  e.config = {cfg.architecture.depth, cfg.architecture.width, cfg.loss.q, cfg.loss.lambda_reg, cfg.loss.lambda};
  e.restart = s.outcome.restart_index;
  e.train_error = s.train.e_total;
  e.gen_error = s.gen ? s.gen->e_g : std::nan("");
  e.gen_error_rel = s.gen ? s.gen->e_g_rel : std::nan("");
  e.wall_time_s = s.outcome.wall_time_s;
  return e;
}

json restart_json(const RestartRecord& r) {
  return {{"index", r.index},
          {"seed", r.seed},
          {"final_loss", json_number(r.final_loss)},
          {"iterations", r.iterations},
          {"diverged", r.diverged},
          {"line_search_failed", r.line_search_failed},
          {"message", r.message}};
}

json breakdown_json(const LossBreakdown& b) {
  return {{"tb", json_number(b.tb)},       {"sb", json_number(b.sb)},   {"int", json_number(b.interior)},
          {"div", json_number(b.div)},     {"reg", json_number(b.reg)}, {"total", json_number(b.total)},
          {"sb_faces", b.sb_faces}};
}

}  // namespace

ProblemConfig parse_problem(const json& j, const std::string& path) {
  const Reader r(j, path);
  r.only({"id", "nu", "n", "a_x", "a_y", "grid_file", "grid_n", "rho", "delta", "t_final"});
  ProblemConfig p;
  p.id = r.string("id", p.id);
  p.nu = r.non_negative("nu", p.nu);
  p.n = r.positive("n", p.n);
  p.a_x = r.number("a_x", p.a_x);
  p.a_y = r.number("a_y", p.a_y);
  p.grid_file = r.string("grid_file", p.grid_file);
  p.grid_n = r.positive("grid_n", p.grid_n);
  p.rho = r.number("rho", p.rho);
  p.delta = r.number("delta", p.delta);
  p.t_final = r.number("t_final", p.t_final);
  if (!(p.t_final > 0.0)) throw ConfigError(r.at("t_final"), "must be positive");
  static const std::set<std::string> ids{"heat_1d",       "heat_nd",      "burgers_sine", "burgers_rarefaction",
                                         "taylor_vortex", "double_shear_layer"};
  if (!ids.count(p.id)) throw ConfigError(r.at("id"), "unknown problem '" + p.id + "'");
  return p;
}

json to_json(const ProblemConfig& p) {
  json j{{"id", p.id}};
  if (p.id == "heat_nd") j["n"] = p.n;
  if (p.id == "burgers_sine" || p.id == "burgers_rarefaction") j["nu"] = p.nu;
  if (p.id == "taylor_vortex") j["a_x"] = p.a_x, j["a_y"] = p.a_y;
  if (p.id == "double_shear_layer") {
    if (!p.grid_file.empty()) j["grid_file"] = p.grid_file;
    j["grid_n"] = p.grid_n;
    j["rho"] = p.rho;
    j["delta"] = p.delta;
    j["t_final"] = p.t_final;
  }
  return j;
}

ProblemSpec make_problem(const ProblemConfig& p) {
  if (p.id == "heat_1d") return heat_1d();
  if (p.id == "heat_nd") return heat_nd(p.n);
  if (p.id == "burgers_sine") return burgers_sine(p.nu);
  if (p.id == "burgers_rarefaction") return burgers_rarefaction(p.nu);
  if (p.id == "taylor_vortex") return taylor_vortex(p.a_x, p.a_y);
  if (p.id == "double_shear_layer") {
    auto grid = std::make_shared<const VelocityGrid>(
        p.grid_file.empty() ? double_shear_layer_grid(p.grid_n, p.rho, p.delta) : read_velocity_grid(p.grid_file));
    return double_shear_layer(grid, p.t_final);
  }
  throw ConfigError("problem.id", "unknown problem '" + p.id + "'");
}

ExperimentConfig parse_config(const json& input, const std::string& scale) {
  if (!input.is_object()) throw ConfigError("", "configuration must be a JSON object");
  json j = input;
  if (j.contains("scales")) {
    const json& scales = j.at("scales");
    if (!scales.is_object()) throw ConfigError("scales", "expected an object");
    if (!scale.empty()) {
      if (!scales.contains(scale)) throw ConfigError("scales." + scale, "scale not defined by this config");
      j.merge_patch(scales.at(scale));
    }
    j.erase("scales");
  }
  const Reader r(j, "");
  r.only({"name", "seed", "problem", "sampling", "architecture", "loss", "optimizer", "evaluation", "convergence",
          "ensemble", "snapshots", "workers"});
  ExperimentConfig c;
  c.name = r.string("name", c.name);
  c.seed = r.seed("seed", c.seed);
  c.workers = r.positive("workers", c.workers);
  c.problem = parse_problem(r.has("problem") ? j.at("problem") : json::object(), "problem");

  const Reader s = r.child("sampling");
  s.only({"kind", "n_int", "n_sb", "n_tb", "k_sets"});
  c.sampling.kind = converted(s.at("kind"), [&] { return rule_kind_from_string(s.string("kind", "sobol")); });
  c.sampling.n_int = s.positive("n_int", c.sampling.n_int);
  c.sampling.n_sb = s.positive("n_sb", c.sampling.n_sb);
  c.sampling.n_tb = s.positive("n_tb", c.sampling.n_tb);
  c.sampling.k_sets = s.positive("k_sets", c.sampling.k_sets);
  if (c.sampling.kind == RuleKind::Sobol && c.problem.id == "heat_nd" && c.problem.n + 1 > kSobolMaxDim)
    throw ConfigError(s.at("kind"), "sobol points exist for at most " + std::to_string(kSobolMaxDim - 1) +
                                        " space dimensions; use monte_carlo");

  const Reader a = r.child("architecture");
  a.only({"depth", "width", "activation"});
  c.architecture.depth = a.positive("depth", c.architecture.depth);
  c.architecture.width = a.positive("width", c.architecture.width);
  c.architecture.activation =
      converted(a.at("activation"), [&] { return activation_from_string(a.string("activation", "tanh")); });

  const Reader l = r.child("loss");
  l.only({"lambda", "q", "lambda_reg"});
  c.loss.lambda = l.non_negative("lambda", c.loss.lambda);
  c.loss.q = l.integer("q", c.loss.q);
  if (c.loss.q != 1 && c.loss.q != 2) throw ConfigError(l.at("q"), "must be 1 or 2");
  c.loss.lambda_reg = l.non_negative("lambda_reg", c.loss.lambda_reg);

  const Reader o = r.child("optimizer");
  o.only({"choice", "iters", "restarts", "learning_rate", "history", "tolerance", "ftol"});
  c.optimizer.kind = converted(o.at("choice"), [&] { return optimizer_from_string(o.string("choice", "lbfgs")); });
  c.optimizer.iters = o.positive("iters", c.optimizer.iters);
  c.optimizer.restarts = o.positive("restarts", c.optimizer.restarts);
  c.optimizer.learning_rate = o.non_negative("learning_rate", c.optimizer.learning_rate);
  c.optimizer.history = o.positive("history", c.optimizer.history);
  c.optimizer.tolerance = o.non_negative("tolerance", c.optimizer.tolerance);
  c.optimizer.ftol = o.non_negative("ftol", c.optimizer.ftol);

  const Reader e = r.child("evaluation");
  e.only({"n_test", "test_seed", "validation_draws", "reference_cells", "bound", "sup_interior", "sup_boundary",
          "sup_seed"});
  c.evaluation.n_test = e.positive("n_test", c.evaluation.n_test);
  c.evaluation.test_seed = e.seed("test_seed", c.evaluation.test_seed);
  c.evaluation.validation_draws = e.positive("validation_draws", c.evaluation.validation_draws);
  c.evaluation.reference_cells = e.positive("reference_cells", c.evaluation.reference_cells);
  c.evaluation.bound = e.boolean("bound", c.evaluation.bound);
  c.evaluation.sup.n_interior = e.positive("sup_interior", c.evaluation.sup.n_interior);
  c.evaluation.sup.n_boundary = e.positive("sup_boundary", c.evaluation.sup.n_boundary);
  c.evaluation.sup.seed = e.seed("sup_seed", c.evaluation.sup.seed);

  const Reader cv = r.child("convergence");
  cv.only({"n_int", "n_b"});
  c.convergence.n_int = cv.list<int>("n_int", {});
  c.convergence.n_b = cv.list<int>("n_b", {});
  if (c.convergence.n_int.size() == 1 && c.convergence.n_b.size() > 1)
    c.convergence.n_int.assign(c.convergence.n_b.size(), c.convergence.n_int[0]);
  if (c.convergence.n_int.size() != c.convergence.n_b.size())
    throw ConfigError(cv.at("n_int"), "n_int and n_b schedules differ in length");
  for (std::size_t i = 0; i < c.convergence.n_int.size(); ++i)
    if (c.convergence.n_int[i] <= 0 || c.convergence.n_b[i] <= 0)
      throw ConfigError(cv.at("n_b"), "counts must be positive");

  const Reader g = r.child("ensemble");
  g.only({"depths", "widths", "qs", "lambda_regs", "lambdas"});
  c.ensemble.depths = g.list<int>("depths", {c.architecture.depth});
  c.ensemble.widths = g.list<int>("widths", {c.architecture.width});
  c.ensemble.qs = g.list<int>("qs", {c.loss.q});
  c.ensemble.lambda_regs = g.list<double>("lambda_regs", {c.loss.lambda_reg});
  c.ensemble.lambdas = g.list<double>("lambdas", {c.loss.lambda});
  for (int v : c.ensemble.depths)
    if (v <= 0) throw ConfigError(g.at("depths"), "must be positive");
  for (int v : c.ensemble.widths)
    if (v <= 0) throw ConfigError(g.at("widths"), "must be positive");
  for (int v : c.ensemble.qs)
    if (v != 1 && v != 2) throw ConfigError(g.at("qs"), "must be 1 or 2");
  for (double v : c.ensemble.lambda_regs)
    if (v < 0) throw ConfigError(g.at("lambda_regs"), "must be non-negative");
  for (double v : c.ensemble.lambdas)
    if (v < 0) throw ConfigError(g.at("lambdas"), "must be non-negative");

  const Reader sn = r.child("snapshots");
  sn.only({"times", "resolution"});
  c.snapshots.times = sn.list<double>("times", {});
  c.snapshots.resolution = sn.positive("resolution", c.snapshots.resolution);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::string& scale) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open configuration");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j, scale);
}

json to_json(const ExperimentConfig& c) {
  return {{"name", c.name},
          {"seed", c.seed},
          {"problem", to_json(c.problem)},
          {"sampling",
           {{"kind", to_string(c.sampling.kind)},
            {"n_int", c.sampling.n_int},
            {"n_sb", c.sampling.n_sb},
            {"n_tb", c.sampling.n_tb},
            {"k_sets", c.sampling.k_sets}}},
          {"architecture",
           {{"depth", c.architecture.depth},
            {"width", c.architecture.width},
            {"activation", to_string(c.architecture.activation)}}},
          {"loss", {{"lambda", c.loss.lambda}, {"q", c.loss.q}, {"lambda_reg", c.loss.lambda_reg}}},
          {"optimizer",
           {{"choice", to_string(c.optimizer.kind)},
            {"iters", c.optimizer.iters},
            {"restarts", c.optimizer.restarts},
            {"learning_rate", c.optimizer.learning_rate},
            {"history", c.optimizer.history},
            {"tolerance", c.optimizer.tolerance},
            {"ftol", c.optimizer.ftol}}},
          {"evaluation",
           {{"n_test", c.evaluation.n_test},
            {"test_seed", c.evaluation.test_seed},
            {"validation_draws", c.evaluation.validation_draws},
            {"reference_cells", c.evaluation.reference_cells},
            {"bound", c.evaluation.bound},
            {"sup_interior", c.evaluation.sup.n_interior},
            {"sup_boundary", c.evaluation.sup.n_boundary},
            {"sup_seed", c.evaluation.sup.seed}}},
          {"workers", c.workers}};
}

std::optional<FieldEvaluator> reference_field(const ProblemSpec& spec, const ProblemConfig&,
                                              const EvaluationConfig& e) {
  return build_reference(spec, e).field;
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const ProblemSpec spec = make_problem(cfg.problem);
  const Reference ref = build_reference(spec, cfg.evaluation);
  const int components = spec.kind == ProblemKind::Euler ? spec.spatial_dim() : 0;
  const int K = cfg.sampling.k_sets;
  const Box box = spec.geometry.space_time();

  RunResult res;
  std::vector<std::optional<SetResult>> slots(static_cast<std::size_t>(K));
  const int workers = std::min(cfg.workers, K);
  const EvalOptions eval{256, workers <= 1};
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(K));
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
  for (int k = 0; k < K; ++k) {
    try {
      const std::uint64_t seed = draw_seed(cfg.seed, k);
      TrainingSet sets = build_training_set(spec.geometry, cfg.sampling.n_int, cfg.sampling.n_sb,
                                            cfg.sampling.n_tb, cfg.sampling.kind, seed);
      TrainOutcome outcome = train(spec, sets, cfg.architecture, cfg.loss, cfg.optimizer, seed, eval);
      const TrainingErrorReport tr = training_error(outcome.final_breakdown, cfg.loss, spec.kind);
      std::optional<GeneralizationReport> gen;
      if (ref.field)
        gen = generalization_error(field_of(outcome.model), *ref.field, box, cfg.evaluation.n_test,
                                   cfg.evaluation.test_seed, components);
      slots[static_cast<std::size_t>(k)] = SetResult{std::move(outcome), tr, gen, std::move(sets)};
    } catch (...) {
      failures[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  // First failure in draw order, whatever the thread schedule was.
  for (const std::exception_ptr& f : failures)
    if (f) std::rethrow_exception(f);
  for (auto& s : slots) res.sets.push_back(std::move(*s));

  for (const SetResult& s : res.sets) res.e_t_bar += s.train.e_total / K;
  if (ref.field) {
    res.e_g_bar = 0.0;
    res.e_g_rel_bar = 0.0;
    for (const SetResult& s : res.sets) {
      *res.e_g_bar += s.gen->e_g / K;
      *res.e_g_rel_bar += s.gen->e_g_rel / K;
    }
  }

  const SetResult& first = res.sets.front();
  const double measured = first.gen ? first.gen->e_g : std::nan("");
  if (cfg.evaluation.bound) {
    if (spec.kind == ProblemKind::Heat) {
      if (cfg.sampling.kind == RuleKind::MonteCarlo) {
        std::vector<TrainingSet> validation, training;
        std::vector<Model> models;
        for (int d = 0; d < cfg.evaluation.validation_draws; ++d)
          validation.push_back(build_training_set(spec.geometry, cfg.sampling.n_int, cfg.sampling.n_sb,
                                                  cfg.sampling.n_tb, RuleKind::MonteCarlo,
                                                  validation_seed(cfg.seed, d)));
        for (const SetResult& s : res.sets) {
          training.push_back(s.sets);
          models.push_back(s.outcome.model);
        }
        res.validation = validation_report(spec, std::span<const Model>(models), training, validation);
        res.bound = heat_bound(spec, models, training, *res.validation, *spec.exact,
                               res.e_g_bar.value_or(std::nan("")), cfg.evaluation.sup);
      } else {
        res.bound = heat_training_bound(spec, first.outcome.model, first.sets, *spec.exact, measured,
                                        cfg.evaluation.sup);
      }
    } else if (spec.kind == ProblemKind::ConservationLaw) {
      res.bound = burgers_bound(spec, first.outcome.model, first.sets, scalar_truth(ref.grid), measured,
                                cfg.evaluation.sup);
    } else if (spec.exact) {
      res.bound = euler_bound(spec, first.outcome.model, first.sets, *spec.exact, measured, cfg.evaluation.sup);
    }
  }

  json sets = json::array();
  json timing = json::array();
  for (std::size_t k = 0; k < res.sets.size(); ++k) {
    const SetResult& s = res.sets[k];
    json restarts = json::array();
    for (const RestartRecord& r : s.outcome.restarts) restarts.push_back(restart_json(r));
    sets.push_back({{"draw", k},
                    {"seed", draw_seed(cfg.seed, static_cast<int>(k))},
                    {"restart_index", s.outcome.restart_index},
                    {"restarts", restarts},
                    {"loss", breakdown_json(s.outcome.final_breakdown)},
                    {"training_error", to_json(s.train)},
                    {"generalization", s.gen ? to_json(*s.gen) : json(nullptr)}});
    timing.push_back({{"draw", k}, {"wall_time_s", s.outcome.wall_time_s}});
  }
  res.summary = {{"name", cfg.name},
                 {"config", to_json(cfg)},
                 {"draws", sets},
                 {"cumulative",
                  {{"e_t_bar", json_number(res.e_t_bar)},
                   {"e_g_bar", optional_json(res.e_g_bar)},
                   {"e_g_rel_bar", optional_json(res.e_g_rel_bar)}}},
                 {"validation", res.validation ? to_json(*res.validation) : json(nullptr)},
                 {"bound", res.bound ? to_json(*res.bound) : json(nullptr)}};

  if (!out.empty()) {
    std::filesystem::create_directories(out);
    write_file(out / "summary.json", res.summary.dump(2) + "\n");
    write_file(out / "timing.json", json{{"draws", timing}}.dump(2) + "\n");
    std::vector<EnsembleEntry> rows;
    for (const SetResult& s : res.sets) rows.push_back(results_row(cfg, s));
    std::ostringstream csv;
    write_ensemble_csv(csv, rows);
    write_file(out / "results.csv", csv.str());
    std::ostringstream hist;
    hist << "draw,iteration,loss\n";
    for (std::size_t k = 0; k < res.sets.size(); ++k) {
      const auto& h = res.sets[k].outcome.loss_history;
      for (std::size_t i = 0; i < h.size(); ++i) hist << k << ',' << i << ',' << num(h[i]) << '\n';
    }
    write_file(out / "loss_history.csv", hist.str());
    save_checkpoint(out / "checkpoint.json", first.outcome.model, to_json(cfg.problem));
  }
  return res;
}

std::vector<ConvergenceRow> run_convergence_study(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  if (cfg.sampling.kind != RuleKind::MonteCarlo)
    throw ConfigError("sampling.kind", "the convergence study needs monte_carlo points");
  if (make_problem(cfg.problem).kind != ProblemKind::Heat)
    throw ConfigError("problem.id", "the convergence study bound is available for heat problems");
  std::vector<int> n_int = cfg.convergence.n_int, n_b = cfg.convergence.n_b;
  if (n_b.empty()) {
    n_int = {cfg.sampling.n_int};
    n_b = {cfg.sampling.n_sb};
  }
  std::vector<ConvergenceRow> rows;
  json detail = json::array();
  for (std::size_t i = 0; i < n_b.size(); ++i) {
    ExperimentConfig c = cfg;
    c.sampling.n_int = n_int[i];
    c.sampling.n_sb = c.sampling.n_tb = n_b[i];
    c.evaluation.bound = true;
    const RunResult r = run_experiment(c);
    ConvergenceRow row;
    row.n_int = n_int[i];
    row.n_b = n_b[i];
    row.e_t_bar = r.e_t_bar;
    const ValidationReport& v = *r.validation;
    row.gap = std::sqrt(v.gap[0] * v.gap[0] + v.gap[1] * v.gap[1] + v.gap[2] * v.gap[2]);
    row.bound = *r.bound;
    row.std_terms = row.bound.term("std_tb") + row.bound.term("std_int") + row.bound.term("std_sb");
    row.bound_total = row.bound.bound_total;
    row.e_g_bar = r.e_g_bar.value_or(std::nan(""));
    rows.push_back(row);
    detail.push_back({{"N_int", row.n_int},
                      {"N_b", row.n_b},
                      {"validation", to_json(v)},
                      {"bound", to_json(row.bound)},
                      {"e_t_bar", json_number(row.e_t_bar)},
                      {"e_g_bar", json_number(row.e_g_bar)}});
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ostringstream csv;
    csv << "N_int,N_b,e_t_bar,gap,std_terms,bound_total,e_g_bar\n";
    for (const ConvergenceRow& r : rows)
      csv << r.n_int << ',' << r.n_b << ',' << num(r.e_t_bar) << ',' << num(r.gap) << ',' << num(r.std_terms)
          << ',' << num(r.bound_total) << ',' << num(r.e_g_bar) << '\n';
    write_file(out / "convergence.csv", csv.str());
    write_file(out / "convergence.json", json{{"name", cfg.name}, {"config", to_json(cfg)}, {"rows", detail}}.dump(2) + "\n");
  }
  return rows;
}

EnsembleRun run_ensemble(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const ProblemSpec spec = make_problem(cfg.problem);
  const Reference ref = build_reference(spec, cfg.evaluation);
  if (!ref.field) throw ConfigError("problem.id", "ensemble scoring needs a reference solution");
  const TrainingSet sets = build_training_set(spec.geometry, cfg.sampling.n_int, cfg.sampling.n_sb,
                                              cfg.sampling.n_tb, cfg.sampling.kind, cfg.seed);
  EnsembleOptions opt;
  opt.activation = cfg.architecture.activation;
  opt.optimizer = cfg.optimizer;
  opt.seed = cfg.seed;
  opt.n_test = cfg.evaluation.n_test;
  opt.test_seed = cfg.evaluation.test_seed;
  opt.workers = cfg.workers;
  EnsembleRun run;
  run.entries = ensemble_search(spec, sets, cfg.ensemble, *ref.field, opt);
  run.marginals = marginals(run.entries);
  run.log_correlation = log_error_correlation(run.entries);

  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ostringstream e, m, s;
    write_ensemble_csv(e, run.entries);
    write_marginals_csv(m, run.marginals);
    write_scatter_csv(s, run.entries);
    write_file(out / "ensemble.csv", e.str());
    write_file(out / "marginals.csv", m.str());
    write_file(out / "scatter.csv", s.str());
    json failed = json::array();
    int completed = 0;
    for (const EnsembleEntry& x : run.entries) {
      if (x.failed)
        failed.push_back({{"index", x.index}, {"message", x.message}});
      else
        ++completed;
    }
    json best = nullptr;
    if (completed > 0) {
      const EnsembleEntry& b = run.entries.front();
      best = {{"index", b.index},
              {"depth", b.config.depth},
              {"width", b.config.width},
              {"q", b.config.q},
              {"lambda_reg", b.config.lambda_reg},
              {"lambda", b.config.lambda},
              {"train_error", json_number(b.train_error)},
              {"gen_error_rel", json_number(b.gen_error_rel)}};
    }
    write_file(out / "ensemble.json", json{{"name", cfg.name},
                                           {"configurations", run.entries.size()},
                                           {"completed", completed},
                                           {"failed", failed},
                                           {"best", best},
                                           {"log_error_correlation", json_number(run.log_correlation)}}
                                              .dump(2) + "\n");
  }
  return run;
}

std::vector<std::filesystem::path> emit_snapshots(const std::filesystem::path& checkpoint,
                                                  std::span<const double> times, int resolution,
                                                  const std::filesystem::path& out) {
  if (resolution < 2) throw ConfigError("snapshots.resolution", "needs at least 2 points per axis");
  json problem;
  const Model model = load_checkpoint(checkpoint, &problem);
  const ProblemSpec spec = make_problem(parse_problem(problem, "checkpoint.problem"));
  const double T = spec.geometry.t_final;
  for (double t : times)
    if (!(t >= 0.0 && t <= T))
      throw DomainError("snapshot time " + num(t) + " outside [0, " + num(T) + "]");

  const Box& space = spec.geometry.space;
  const int d = space.dim();
  const int m = model.output_dim();
  const int per_axis = d == 1 ? 1 : 2;
  const int n = d == 1 ? resolution : resolution * resolution;
  const bool vorticity = spec.kind == ProblemKind::Euler && d == 2;
  const char* names_euler[] = {"u", "v", "p"};

  std::filesystem::create_directories(out);
  std::vector<std::filesystem::path> files;
  for (double t : times) {
    Eigen::MatrixXd pts(d + 1, n);
    for (int k = 0; k < n; ++k) {
      pts(0, k) = t;
      for (int a = 0; a < d; ++a) pts(a + 1, k) = 0.5 * (space.lo[a] + space.hi[a]);
      const int i = k % resolution, j = k / resolution;
      pts(1, k) = space.lo[0] + space.extent(0) * i / (resolution - 1);
      if (per_axis == 2) pts(2, k) = space.lo[1] + space.extent(1) * j / (resolution - 1);
    }
    const Eigen::MatrixXd vals = model.evaluate(pts);
    Eigen::VectorXd omega;
    if (vorticity) omega = vorticity_field(ModelSource(model), pts);

    std::ostringstream csv;
    csv << (d == 1 ? "x" : "x,y");
    for (int c = 0; c < m; ++c)
      csv << ',' << (m == 1 ? "u" : spec.kind == ProblemKind::Euler && c < 3 ? names_euler[c] : "u" + std::to_string(c));
    if (vorticity) csv << ",omega";
    csv << '\n';
    for (int k = 0; k < n; ++k) {
      csv << num(pts(1, k));
      if (per_axis == 2) csv << ',' << num(pts(2, k));
      for (int c = 0; c < m; ++c) csv << ',' << num(vals(c, k));
      if (vorticity) csv << ',' << num(omega(k));
      csv << '\n';
    }
    const std::filesystem::path file = out / ("snapshot_t" + num(t) + ".csv");
    write_file(file, csv.str());
    files.push_back(file);
  }
  return files;
}

}  // namespace pinn
