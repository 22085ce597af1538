#include "pinn/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <omp.h>

#include "pinn/errors.hpp"

namespace pinn {

std::size_t HyperGrid::size() const {
  return depths.size() * widths.size() * qs.size() * lambda_regs.size() * lambdas.size();
}

HyperConfig HyperGrid::at(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("HyperGrid::at: index past the grid");
  HyperConfig c;
  c.lambda = lambdas[index % lambdas.size()];
  index /= lambdas.size();
  c.lambda_reg = lambda_regs[index % lambda_regs.size()];
  index /= lambda_regs.size();
  c.q = qs[index % qs.size()];
  index /= qs.size();
  c.width = widths[index % widths.size()];
  index /= widths.size();
  c.depth = depths[index];
  return c;
}

HyperGrid heat_table_grid() {
  return {{2, 4, 8}, {12, 16, 20}, {1, 2}, {0.0, 1e-6, 1e-5, 1e-4, 1e-3}, {0.01, 0.1, 1.0, 10.0}};
}

std::vector<EnsembleEntry> ensemble_search(const ProblemSpec& spec, const TrainingSet& sets,
                                           const HyperGrid& grid, const FieldEvaluator& truth,
                                           const EnsembleOptions& options) {
  const std::size_t n = grid.size();
  std::vector<EnsembleEntry> out(n);
  const Box box = spec.geometry.space_time();
  const int components = spec.kind == ProblemKind::Euler ? spec.spatial_dim() : 0;
  const int workers = std::max(1, options.workers);
  // With several workers each run is serial; a lone worker parallelizes inside.
  const EvalOptions eval{256, workers == 1};

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1)
  for (std::size_t i = 0; i < n; ++i) {
    EnsembleEntry& e = out[i];
    e.index = i;
    e.config = grid.at(i);
    e.seed = config_seed(options.seed, i);
    const auto start = std::chrono::steady_clock::now();
    try {
      const LossConfig cfg{e.config.lambda, e.config.q, e.config.lambda_reg};
      const TrainOutcome t = train(spec, sets, {e.config.depth, e.config.width, options.activation}, cfg,
                                   options.optimizer, e.seed, eval);
      e.restart = t.restart_index;
      e.train_error = training_error(t.final_breakdown, cfg, spec.kind).e_total;
      const GeneralizationReport g =
          generalization_error(field_of(t.model), truth, box, options.n_test, options.test_seed, components);
      e.gen_error = g.e_g;
      e.gen_error_rel = g.e_g_rel;
    } catch (const Error& err) {
      e.failed = true;
      e.message = err.what();
    }
    e.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  std::stable_sort(out.begin(), out.end(), [](const EnsembleEntry& a, const EnsembleEntry& b) {
    if (a.failed != b.failed) return !a.failed;
    if (a.failed) return false;
    return a.train_error < b.train_error;
  });
  return out;
}

namespace {

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::vector<Marginal> marginals(const std::vector<EnsembleEntry>& entries) {
  struct Axis {
    const char* name;
    double (*get)(const HyperConfig&);
  };
  const Axis axes[] = {
      {"depth", [](const HyperConfig& c) { return double(c.depth); }},
      {"width", [](const HyperConfig& c) { return double(c.width); }},
      {"q", [](const HyperConfig& c) { return double(c.q); }},
      {"lambda_reg", [](const HyperConfig& c) { return c.lambda_reg; }},
      {"lambda", [](const HyperConfig& c) { return c.lambda; }},
  };
  std::vector<Marginal> out;
  for (const Axis& a : axes) {
    std::vector<double> values;
    for (const EnsembleEntry& e : entries)
      if (!e.failed) values.push_back(a.get(e.config));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (double v : values) {
      std::vector<double> errs;
      for (const EnsembleEntry& e : entries)
        if (!e.failed && a.get(e.config) == v) errs.push_back(e.gen_error_rel);
      std::sort(errs.begin(), errs.end());
      Marginal m;
      m.hyperparameter = a.name;
      m.value = v;
      m.count = static_cast<int>(errs.size());
      m.min = errs.front();
      m.q25 = quantile(errs, 0.25);
      m.median = quantile(errs, 0.5);
      m.q75 = quantile(errs, 0.75);
      m.max = errs.back();
      out.push_back(m);
    }
  }
  return out;
}

double log_error_correlation(const std::vector<EnsembleEntry>& entries) {
  std::vector<double> x, y;
  for (const EnsembleEntry& e : entries) {
    if (e.failed || !(e.train_error > 0.0) || !(e.gen_error > 0.0)) continue;
    x.push_back(std::log10(e.train_error));
    y.push_back(std::log10(e.gen_error));
  }
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleEntry>& entries) {
  out << "depth,width,q,lambda_reg,lambda,restart,train_error,gen_error_rel,wall_time_s\n";
  for (const EnsembleEntry& e : entries) {
    const HyperConfig& c = e.config;
    out << c.depth << ',' << c.width << ',' << c.q << ',' << num(c.lambda_reg) << ',' << num(c.lambda) << ','
        << e.restart << ',' << (e.failed ? "nan" : num(e.train_error)) << ','
        << (e.failed ? "nan" : num(e.gen_error_rel)) << ',' << num(e.wall_time_s) << '\n';
  }
}

void write_marginals_csv(std::ostream& out, const std::vector<Marginal>& m) {
  out << "hyperparameter,value,count,min,q25,median,q75,max\n";
  for (const Marginal& r : m)
    out << r.hyperparameter << ',' << num(r.value) << ',' << r.count << ',' << num(r.min) << ',' << num(r.q25)
        << ',' << num(r.median) << ',' << num(r.q75) << ',' << num(r.max) << '\n';
}

void write_scatter_csv(std::ostream& out, const std::vector<EnsembleEntry>& entries) {
  out << "index,train_error,gen_error,gen_error_rel\n";
  for (const EnsembleEntry& e : entries)
    if (!e.failed)
      out << e.index << ',' << num(e.train_error) << ',' << num(e.gen_error) << ',' << num(e.gen_error_rel)
          << '\n';
}

}  // namespace pinn
