#include "pinn/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pinn/errors.hpp"

namespace pinn {

using std::numbers::pi;

FluxSpec FluxSpec::burgers() {
  return {"burgers", [](double u) { return 0.5 * u * u; }, [](double u) { return u; },
          [](double) { return 1.0; }, 0.0};
}

FluxSpec FluxSpec::zero() {
  return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; },
          [](double) { return 0.0; }, std::nullopt};
}

FluxSpec FluxSpec::linear(double speed) {
  return {"linear", [speed](double u) { return speed * u; }, [speed](double) { return speed; },
          [](double) { return 0.0; }, std::nullopt};
}

SourceTerm SourceTerm::zero() {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }, 0.0, true};
}

JetBatch AnalyticField::evaluate(const Eigen::MatrixXd& points, const JetRequest& request) const {
  const int dbar = input_dim(), m = output_dim(), B = static_cast<int>(points.cols());
  if (points.rows() != dbar) throw ShapeError("points do not match field input dimension");
  JetBatch out;
  out.value.resize(m, B);
  out.grad.resize(dbar);
  out.hess.resize(dbar);
  if (request.first)
    for (int j = 0; j < dbar; ++j) out.grad[j].resize(m, B);
  for (int s : request.second) out.hess[s].resize(m, B);
  for (int c = 0; c < B; ++c) {
    const Eigen::VectorXd y = points.col(c);
    if (!request.first) {
      out.value.col(c) = value(as_span(y));
      continue;
    }
    const Jet j = jet(as_span(y));
    out.value.col(c) = j.value;
    for (int a = 0; a < dbar; ++a) out.grad[a].col(c) = j.grad.col(a);
    for (int s : request.second) out.hess[s].col(c) = j.hess_diag.col(s);
  }
  return out;
}

Eigen::MatrixXd AnalyticField::values(const Eigen::MatrixXd& points) const {
  return evaluate(points, JetRequest::value_only()).value;
}

JetBatch ModelSource::evaluate(const Eigen::MatrixXd& points, const JetRequest& request) const {
  return ModelTape(*model_, points, request).outputs();
}

// ---------------------------------------------------------------------------
// Exact solutions

double exact_heat_1d(double x, double t) { return -std::sin(pi * x) * std::exp(-pi * pi * t); }

double exact_heat_nd(std::span<const double> x, double t, int n) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return r2 / n + 2.0 * t;
}

Eigen::Vector2d exact_taylor_vortex(double x, double y, double t, double a_x, double a_y) {
  const double xi = x - a_x * t, eta = y - a_y * t;
  const double e = std::exp(0.5 * (1.0 - xi * xi - eta * eta));
  return {-eta * e + a_x, xi * e + a_y};
}

double rarefaction_initial_data(double x) { return x <= 0.0 ? 0.0 : 1.0; }

Jet Heat1dExact::jet(std::span<const double> y) const {
  const double t = y[0], x = y[1];
  const double e = std::exp(-nu_ * pi * pi * t);
  const double u = -std::sin(pi * x) * e;
  Jet j{Eigen::VectorXd(1), Eigen::MatrixXd(1, 2), Eigen::MatrixXd(1, 2)};
  j.value(0) = u;
  j.grad(0, 0) = -nu_ * pi * pi * u;
  j.grad(0, 1) = -pi * std::cos(pi * x) * e;
  j.hess_diag(0, 0) = nu_ * nu_ * std::pow(pi, 4) * u;
  j.hess_diag(0, 1) = -pi * pi * u;
  return j;
}

Jet HeatNdExact::jet(std::span<const double> y) const {
  Jet j{Eigen::VectorXd(1), Eigen::MatrixXd(1, d_ + 1), Eigen::MatrixXd(1, d_ + 1)};
  j.value(0) = exact_heat_nd(y.subspan(1), y[0], n_);
  j.grad(0, 0) = 2.0;
  j.hess_diag(0, 0) = 0.0;
  for (int i = 1; i <= d_; ++i) {
    j.grad(0, i) = 2.0 * y[i] / n_;
    j.hess_diag(0, i) = 2.0 / n_;
  }
  return j;
}

Jet TaylorVortexExact::jet(std::span<const double> yv) const {
  const double t = yv[0], x = yv[1], y = yv[2];
  const double xi = x - a_x_ * t, eta = y - a_y_ * t;
  const double e = std::exp(0.5 * (1.0 - xi * xi - eta * eta));
  const double e2 = e * e;
  // Derivatives in the co-moving coordinates (xi, eta).
  struct D {
    double v, dx, dy, dxx, dyy, dxy;
  };
  const D u{-eta * e + a_x_,        xi * eta * e,      (eta * eta - 1.0) * e, eta * (1.0 - xi * xi) * e,
            eta * (3.0 - eta * eta) * e, xi * (1.0 - eta * eta) * e};
  const D v{xi * e + a_y_,          (1.0 - xi * xi) * e, -xi * eta * e,       -xi * (3.0 - xi * xi) * e,
            -xi * (1.0 - eta * eta) * e, -eta * (1.0 - xi * xi) * e};
  const D p{-0.5 * e2, xi * e2, eta * e2, (1.0 - 2.0 * xi * xi) * e2, (1.0 - 2.0 * eta * eta) * e2,
            -2.0 * xi * eta * e2};
  Jet j{Eigen::VectorXd(3), Eigen::MatrixXd(3, 3), Eigen::MatrixXd(3, 3)};
  const D* comps[3] = {&u, &v, &p};
  for (int c = 0; c < 3; ++c) {
    const D& g = *comps[c];
    j.value(c) = g.v;
    j.grad(c, 0) = -a_x_ * g.dx - a_y_ * g.dy;
    j.grad(c, 1) = g.dx;
    j.grad(c, 2) = g.dy;
    j.hess_diag(c, 0) = a_x_ * a_x_ * g.dxx + 2.0 * a_x_ * a_y_ * g.dxy + a_y_ * a_y_ * g.dyy;
    j.hess_diag(c, 1) = g.dxx;
    j.hess_diag(c, 2) = g.dyy;
  }
  return j;
}

Jet RarefactionExact::jet(std::span<const double> y) const {
  const double t = y[0], x = y[1];
  Jet j{Eigen::VectorXd(1), Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 2)};
  if (t <= 0.0) {
    j.value(0) = rarefaction_initial_data(x);
    return j;
  }
  const double s = x / t;
  if (s <= 0.0) {
    j.value(0) = 0.0;
  } else if (s >= 1.0) {
    j.value(0) = 1.0;
  } else {
    j.value(0) = s;
    j.grad(0, 0) = -x / (t * t);
    j.grad(0, 1) = 1.0 / t;
    j.hess_diag(0, 0) = 2.0 * x / (t * t * t);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Residuals

JetRequest interior_request(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::Heat: {
      std::vector<int> s;
      for (int i = 1; i <= spec.spatial_dim(); ++i) s.push_back(i);
      return JetRequest::with_second(s);
    }
    case ProblemKind::ConservationLaw:
      return spec.nu > 0.0 ? JetRequest::with_second({1}) : JetRequest::first_order();
    case ProblemKind::Euler:
      return JetRequest::first_order();
  }
  return {};
}

JetRequest boundary_request(const ProblemSpec&) { return JetRequest::value_only(); }
JetRequest initial_request(const ProblemSpec&) { return JetRequest::value_only(); }

int interior_rows(const ProblemSpec& spec) {
  return spec.kind == ProblemKind::Euler ? spec.spatial_dim() + 1 : 1;
}

int divergence_row(const ProblemSpec& spec) {
  return spec.kind == ProblemKind::Euler ? spec.spatial_dim() : -1;
}

namespace {

void check_euler(const ProblemSpec& spec) {
  if (spec.spatial_dim() != 2 || spec.output_dim != 3)
    throw UnsupportedDimensionError("Euler residuals are implemented for d = 2 with outputs (u, v, p)");
}

}  // namespace

Eigen::MatrixXd interior_residual(const ProblemSpec& spec, const Eigen::MatrixXd& points,
                                  const JetBatch& jets) {
  const int B = jets.points();
  Eigen::MatrixXd r(interior_rows(spec), B);
  switch (spec.kind) {
    case ProblemKind::Heat: {
      r.row(0) = jets.grad[0].row(0);
      for (int i = 1; i <= spec.spatial_dim(); ++i) r.row(0) -= spec.nu * jets.hess[i].row(0);
      if (!spec.source.is_zero)
        for (int c = 0; c < B; ++c) r(0, c) -= spec.source.f(jets.value(0, c));
      break;
    }
    case ProblemKind::ConservationLaw: {
      const FluxSpec& flux = *spec.flux;
      for (int c = 0; c < B; ++c)
        r(0, c) = jets.grad[0](0, c) + flux.f_prime(jets.value(0, c)) * jets.grad[1](0, c);
      if (spec.nu > 0.0) r.row(0) -= spec.nu * jets.hess[1].row(0);
      break;
    }
    case ProblemKind::Euler: {
      check_euler(spec);
      const auto u = jets.value.row(0).array(), v = jets.value.row(1).array();
      const auto& gt = jets.grad[0];
      const auto& gx = jets.grad[1];
      const auto& gy = jets.grad[2];
      r.row(0) = (gt.row(0).array() + u * gx.row(0).array() + v * gy.row(0).array() + gx.row(2).array()).matrix();
      r.row(1) = (gt.row(1).array() + u * gx.row(1).array() + v * gy.row(1).array() + gy.row(2).array()).matrix();
      r.row(2) = gx.row(0) + gy.row(1);
      if (spec.forcing)
        for (int c = 0; c < B; ++c) {
          const Eigen::VectorXd y = points.col(c);
          const Eigen::VectorXd f = spec.forcing(as_span(y));
          r(0, c) -= f(0);
          r(1, c) -= f(1);
        }
      break;
    }
  }
  return r;
}

void interior_pullback(const ProblemSpec& spec, const Eigen::MatrixXd&, const JetBatch& jets,
                       const Eigen::MatrixXd& rbar, JetBatch& adj) {
  const int B = jets.points();
  switch (spec.kind) {
    case ProblemKind::Heat: {
      adj.grad[0].row(0) += rbar.row(0);
      for (int i = 1; i <= spec.spatial_dim(); ++i) adj.hess[i].row(0) -= spec.nu * rbar.row(0);
      if (!spec.source.is_zero)
        for (int c = 0; c < B; ++c) adj.value(0, c) -= spec.source.f_prime(jets.value(0, c)) * rbar(0, c);
      break;
    }
    case ProblemKind::ConservationLaw: {
      const FluxSpec& flux = *spec.flux;
      adj.grad[0].row(0) += rbar.row(0);
      for (int c = 0; c < B; ++c) {
        const double u = jets.value(0, c);
        adj.value(0, c) += flux.f_second(u) * jets.grad[1](0, c) * rbar(0, c);
        adj.grad[1](0, c) += flux.f_prime(u) * rbar(0, c);
      }
      if (spec.nu > 0.0) adj.hess[1].row(0) -= spec.nu * rbar.row(0);
      break;
    }
    case ProblemKind::Euler: {
      const auto ru = rbar.row(0).array(), rv = rbar.row(1).array(), rd = rbar.row(2).array();
      const auto u = jets.value.row(0).array(), v = jets.value.row(1).array();
      const auto& gx = jets.grad[1];
      const auto& gy = jets.grad[2];
      adj.value.row(0).array() += ru * gx.row(0).array() + rv * gx.row(1).array();
      adj.value.row(1).array() += ru * gy.row(0).array() + rv * gy.row(1).array();
      adj.grad[0].row(0).array() += ru;
      adj.grad[0].row(1).array() += rv;
      adj.grad[1].row(0).array() += ru * u + rd;
      adj.grad[1].row(1).array() += rv * u;
      adj.grad[1].row(2).array() += ru;
      adj.grad[2].row(0).array() += ru * v;
      adj.grad[2].row(1).array() += rv * v + rd;
      adj.grad[2].row(2).array() += rv;
      break;
    }
  }
}

Eigen::MatrixXd boundary_residual(const ProblemSpec& spec, const Eigen::MatrixXd& points,
                                  std::span<const int> labels, const JetBatch& jets,
                                  const JetBatch* partner) {
  const int B = jets.points();
  switch (spec.boundary) {
    case BoundaryKind::Dirichlet: {
      Eigen::MatrixXd r = jets.value;
      if (spec.boundary_data)
        for (int c = 0; c < B; ++c) {
          const Eigen::VectorXd y = points.col(c);
          r.col(c) -= spec.boundary_data(as_span(y));
        }
      return r;
    }
    case BoundaryKind::Periodic:
      if (!partner) throw ShapeError("periodic boundary residual needs partner jets");
      return jets.value - partner->value;
    case BoundaryKind::NoPenetration: {
      Eigen::MatrixXd r(1, B);
      for (int c = 0; c < B; ++c) {
        const int axis = labels[c] / 2;
        const double sign = labels[c] % 2 == 0 ? -1.0 : 1.0;
        r(0, c) = sign * jets.value(axis, c);
      }
      return r;
    }
  }
  return {};
}

void boundary_pullback(const ProblemSpec& spec, const Eigen::MatrixXd&, std::span<const int> labels,
                       const JetBatch& jets, const JetBatch*, const Eigen::MatrixXd& rbar,
                       JetBatch& adj, JetBatch* partner_adj) {
  switch (spec.boundary) {
    case BoundaryKind::Dirichlet:
      adj.value += rbar;
      break;
    case BoundaryKind::Periodic:
      adj.value += rbar;
      if (!partner_adj) throw ShapeError("periodic boundary pullback needs a partner adjoint");
      partner_adj->value -= rbar;
      break;
    case BoundaryKind::NoPenetration:
      for (int c = 0; c < jets.points(); ++c) {
        const int axis = labels[c] / 2;
        const double sign = labels[c] % 2 == 0 ? -1.0 : 1.0;
        adj.value(axis, c) += sign * rbar(0, c);
      }
      break;
  }
}

Eigen::MatrixXd initial_residual(const ProblemSpec& spec, const Eigen::MatrixXd& points,
                                 const JetBatch& jets) {
  const int B = jets.points();
  const int rows = spec.kind == ProblemKind::Euler ? spec.spatial_dim() : spec.output_dim;
  Eigen::MatrixXd r = jets.value.topRows(rows);
  for (int c = 0; c < B; ++c) {
    const Eigen::VectorXd x = points.col(c).tail(spec.spatial_dim());
    r.col(c) -= spec.initial_data(as_span(x));
  }
  return r;
}

void initial_pullback(const ProblemSpec&, const Eigen::MatrixXd&, const JetBatch&,
                      const Eigen::MatrixXd& rbar, JetBatch& adj) {
  adj.value.topRows(rbar.rows()) += rbar;
}

ResidualBundle residuals(const ProblemSpec& spec, const JetSource& source, const TrainingSet& sets) {
  ResidualBundle b;
  const JetBatch ij = source.evaluate(sets.interior.points, interior_request(spec));
  Eigen::MatrixXd ir = interior_residual(spec, sets.interior.points, ij);
  const int drow = divergence_row(spec);
  if (drow >= 0) {
    b.divergence = ir.row(drow);
    b.interior = ir.topRows(drow);
  } else {
    b.interior = std::move(ir);
  }
  const JetBatch sj = source.evaluate(sets.spatial_boundary.points, boundary_request(spec));
  std::optional<JetBatch> pj;
  if (spec.boundary == BoundaryKind::Periodic)
    pj = source.evaluate(sets.sb_partner, boundary_request(spec));
  b.spatial_boundary = boundary_residual(spec, sets.spatial_boundary.points, sets.spatial_boundary.labels,
                                         sj, pj ? &*pj : nullptr);
  b.sb_labels = sets.spatial_boundary.labels;
  const JetBatch tj = source.evaluate(sets.temporal_boundary.points, initial_request(spec));
  b.temporal_boundary = initial_residual(spec, sets.temporal_boundary.points, tj);
  return b;
}

ResidualBundle heat_residuals(const JetSource& source, const ProblemSpec& spec, const TrainingSet& sets) {
  if (spec.kind != ProblemKind::Heat) throw ShapeError("not a heat problem");
  return residuals(spec, source, sets);
}

ResidualBundle conservation_law_residuals(const JetSource& source, const ProblemSpec& spec,
                                          const TrainingSet& sets) {
  if (spec.kind != ProblemKind::ConservationLaw || !spec.flux)
    throw ShapeError("not a conservation-law problem");
  return residuals(spec, source, sets);
}

ResidualBundle euler_residuals(const JetSource& source, const ProblemSpec& spec, const TrainingSet& sets) {
  if (spec.kind != ProblemKind::Euler) throw ShapeError("not an Euler problem");
  return residuals(spec, source, sets);
}

// ---------------------------------------------------------------------------
// Shear-layer grid

Eigen::Vector2d VelocityGrid::sample(double x, double y) const {
  const double fx = x / lx * nx, fy = y / ly * ny;
  const double ix0 = std::floor(fx), iy0 = std::floor(fy);
  const double ax = fx - ix0, ay = fy - iy0;
  auto wrap = [](long i, int n) { return static_cast<int>(((i % n) + n) % n); };
  const int x0 = wrap(static_cast<long>(ix0), nx), x1 = wrap(static_cast<long>(ix0) + 1, nx);
  const int y0 = wrap(static_cast<long>(iy0), ny), y1 = wrap(static_cast<long>(iy0) + 1, ny);
  auto lerp2 = [&](const std::vector<double>& f) {
    return (1 - ax) * (1 - ay) * f[y0 * nx + x0] + ax * (1 - ay) * f[y0 * nx + x1] +
           (1 - ax) * ay * f[y1 * nx + x0] + ax * ay * f[y1 * nx + x1];
  };
  return {lerp2(u), lerp2(v)};
}

VelocityGrid read_velocity_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open velocity grid");
  auto next_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      std::replace(line.begin(), line.end(), ',', ' ');
      if (line.find_first_not_of(" \t\r") != std::string::npos && line[line.find_first_not_of(" \t")] != '#')
        return true;
    }
    return false;
  };
  std::string line;
  VelocityGrid g;
  if (!next_line(line)) throw ConfigError(path.string(), "empty velocity grid");
  {
    std::istringstream hs(line);
    if (!(hs >> g.nx >> g.ny >> g.lx >> g.ly) || g.nx < 2 || g.ny < 2 || !(g.lx > 0) || !(g.ly > 0))
      throw ConfigError(path.string(), "bad header, expected 'nx ny Lx Ly'");
  }
  const std::size_t n = static_cast<std::size_t>(g.nx) * g.ny;
  g.u.reserve(n);
  g.v.reserve(n);
  while (g.u.size() < n && next_line(line)) {
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) throw ConfigError(path.string(), "bad row " + std::to_string(g.u.size() + 1));
    g.u.push_back(a);
    g.v.push_back(b);
  }
  if (g.u.size() != n)
    throw ConfigError(path.string(), "expected " + std::to_string(n) + " rows, got " + std::to_string(g.u.size()));
  return g;
}

void write_velocity_grid(const std::filesystem::path& path, const VelocityGrid& g) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path.string(), "cannot open for writing");
  out.precision(17);
  out << g.nx << " " << g.ny << " " << g.lx << " " << g.ly << "\n";
  for (std::size_t k = 0; k < g.u.size(); ++k) out << g.u[k] << " " << g.v[k] << "\n";
}

VelocityGrid double_shear_layer_grid(int n, double rho, double delta) {
  VelocityGrid g;
  g.nx = g.ny = n;
  g.lx = g.ly = 2.0 * pi;
  g.u.resize(static_cast<std::size_t>(n) * n);
  g.v.resize(g.u.size());
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double x = ix * g.lx / n, y = iy * g.ly / n;
      const double s = y / (2.0 * pi);
      g.u[iy * n + ix] = s <= 0.5 ? std::tanh(rho * (s - 0.25)) : std::tanh(rho * (0.75 - s));
      g.v[iy * n + ix] = delta * std::sin(x);
    }
  return g;
}

// ---------------------------------------------------------------------------
// Presets

ProblemSpec heat_1d() {
  ProblemSpec s;
  s.name = "heat_1d";
  s.kind = ProblemKind::Heat;
  s.geometry = {Box({-1.0}, {1.0}), 1.0, false};
  s.nu = 1.0;
  s.initial_data = [](std::span<const double> x) {
    return Eigen::VectorXd::Constant(1, -std::sin(pi * x[0]));
  };
  s.exact = std::make_shared<Heat1dExact>(1.0);
  return s;
}

ProblemSpec heat_nd(int n) {
  if (n < 1) throw UnsupportedDimensionError("heat dimension must be positive");
  ProblemSpec s;
  s.name = "heat_nd";
  s.kind = ProblemKind::Heat;
  s.geometry = {Box::cube(n, 0.0, 1.0), 1.0, false};
  s.nu = 1.0;
  s.initial_data = [n](std::span<const double> x) {
    return Eigen::VectorXd::Constant(1, exact_heat_nd(x, 0.0, n));
  };
  s.boundary_data = [n](std::span<const double> y) {
    return Eigen::VectorXd::Constant(1, exact_heat_nd(y.subspan(1), y[0], n));
  };
  s.exact = std::make_shared<HeatNdExact>(n, n);
  return s;
}

ProblemSpec conservation_law(std::string name, FluxSpec flux, double nu, double x_lo, double x_hi,
                             double t_final, std::function<double(double)> initial,
                             std::function<double(double)> left, std::function<double(double)> right) {
  if (nu < 0.0) throw DomainError("viscosity must be non-negative");
  ProblemSpec s;
  s.name = std::move(name);
  s.kind = ProblemKind::ConservationLaw;
  s.geometry = {Box({x_lo}, {x_hi}), t_final, false};
  s.nu = nu;
  s.flux = std::move(flux);
  s.initial_data = [initial](std::span<const double> x) { return Eigen::VectorXd::Constant(1, initial(x[0])); };
  s.boundary_data = [left, right, x_lo](std::span<const double> y) {
    return Eigen::VectorXd::Constant(1, y[1] <= x_lo ? left(y[0]) : right(y[0]));
  };
  return s;
}

ProblemSpec burgers_sine(double nu) {
  return conservation_law(
      "burgers_sine", FluxSpec::burgers(), nu, -1.0, 1.0, 1.0,
      [](double x) { return -std::sin(pi * x); }, [](double) { return 0.0; }, [](double) { return 0.0; });
}

ProblemSpec burgers_rarefaction(double nu) {
  ProblemSpec s = conservation_law("burgers_rarefaction", FluxSpec::burgers(), nu, -1.0, 1.0, 0.5,
                                   rarefaction_initial_data, [](double) { return 0.0; },
                                   [](double) { return 1.0; });
  if (nu == 0.0) s.exact = std::make_shared<RarefactionExact>();
  return s;
}

ProblemSpec taylor_vortex(double a_x, double a_y) {
  ProblemSpec s;
  s.name = "taylor_vortex";
  s.kind = ProblemKind::Euler;
  s.geometry = {Box::cube(2, -8.0, 8.0), 1.0, true};
  s.output_dim = 3;
  s.boundary = BoundaryKind::Periodic;
  s.initial_data = [a_x, a_y](std::span<const double> x) -> Eigen::VectorXd {
    return exact_taylor_vortex(x[0], x[1], 0.0, a_x, a_y);
  };
  s.exact = std::make_shared<TaylorVortexExact>(a_x, a_y);
  return s;
}

ProblemSpec double_shear_layer(std::shared_ptr<const VelocityGrid> grid, double t_final) {
  if (!grid) throw ConfigError("shear_layer_file", "missing velocity grid");
  ProblemSpec s;
  s.name = "double_shear_layer";
  s.kind = ProblemKind::Euler;
  s.geometry = {Box({0.0, 0.0}, {grid->lx, grid->ly}), t_final, true};
  s.output_dim = 3;
  s.boundary = BoundaryKind::Periodic;
  s.initial_data = [grid](std::span<const double> x) -> Eigen::VectorXd { return grid->sample(x[0], x[1]); };
  return s;
}

}  // namespace pinn
