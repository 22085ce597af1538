#include "pinn/fv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pinn/errors.hpp"
#include "pinn/quadrature.hpp"

namespace pinn {

double godunov_flux(const FluxSpec& flux, double left, double right) {
  if (flux.sonic_point) {
    if (left <= right) return flux.f(std::clamp(*flux.sonic_point, left, right));
    return std::max(flux.f(left), flux.f(right));
  }
  return flux.f_prime(0.5 * (left + right)) >= 0.0 ? flux.f(left) : flux.f(right);
}

namespace {

double boundary_value(const ProblemSpec& spec, double t, double x) {
  if (!spec.boundary_data) return 0.0;
  const double y[2] = {t, x};
  return spec.boundary_data(std::span<const double>(y, 2))(0);
}

}  // namespace

FvGrid fv_solve(const ProblemSpec& spec, int n_cells, double t_end, double cfl, FvOptions options) {
  if (spec.kind != ProblemKind::ConservationLaw || !spec.flux || spec.spatial_dim() != 1)
    throw ShapeError("finite-volume solver needs a scalar 1D conservation law");
  if (!(cfl > 0.0) || cfl > 1.0) throw StabilityError("CFL number must lie in (0, 1]");
  if (n_cells < 2) throw ShapeError("need at least two cells");
  if (!(t_end > 0.0)) throw DomainError("final time must be positive");
  const FluxSpec& flux = *spec.flux;
  const double nu = spec.nu;

  FvGrid g;
  g.n_cells = n_cells;
  g.x_lo = spec.geometry.space.lo[0];
  g.x_hi = spec.geometry.space.hi[0];
  g.dx = (g.x_hi - g.x_lo) / n_cells;
  g.cfl = cfl;
  g.periodic = spec.boundary == BoundaryKind::Periodic;

  // Initial cell averages with a 4-point Gauss rule per cell.
  Eigen::VectorXd gx, gw;
  gauss_legendre(4, gx, gw);
  std::vector<double> u(n_cells);
  for (int i = 0; i < n_cells; ++i) {
    double s = 0.0;
    for (int q = 0; q < 4; ++q) {
      const double x[1] = {g.center(i) + 0.5 * g.dx * gx(q)};
      s += 0.5 * gw(q) * spec.initial_data(std::span<const double>(x, 1))(0);
    }
    u[i] = s;
  }

  // Wave-speed bound over the range of the data (maximum principle).
  double lo = *std::min_element(u.begin(), u.end()), hi = *std::max_element(u.begin(), u.end());
  if (!g.periodic)
    for (int k = 0; k <= 16; ++k) {
      const double t = t_end * k / 16;
      for (double b : {boundary_value(spec, t, g.x_lo), boundary_value(spec, t, g.x_hi)}) {
        lo = std::min(lo, b);
        hi = std::max(hi, b);
      }
    }
  double speed = 0.0;
  for (int k = 0; k <= 200; ++k) speed = std::max(speed, std::abs(flux.f_prime(lo + (hi - lo) * k / 200)));
  double dt_max = std::numeric_limits<double>::infinity();
  if (speed > 0.0 || nu > 0.0) dt_max = cfl / (speed / g.dx + 2.0 * nu / (g.dx * g.dx));
  if (nu > 0.0) dt_max = std::min(dt_max, g.dx * g.dx / (4.0 * nu));
  g.n_steps = std::max(1, static_cast<int>(std::ceil(t_end / dt_max - 1e-12)));
  g.dt = t_end / g.n_steps;
  if (speed * g.dt / g.dx > cfl * (1 + 1e-12) || speed * g.dt / g.dx + 2 * nu * g.dt / (g.dx * g.dx) > 1.0 + 1e-12)
    throw StabilityError("time step violates the stability limit");

  const int stride = std::max(1, g.n_steps / std::max(1, options.stored_slices));
  auto store = [&](int step) {
    const double t = step * g.dt;
    g.times.push_back(t);
    g.cell_averages.push_back(u);
    g.left_values.push_back(g.periodic ? u.front() : boundary_value(spec, t, g.x_lo));
    g.right_values.push_back(g.periodic ? u.back() : boundary_value(spec, t, g.x_hi));
  };
  store(0);

  std::vector<double> f(n_cells + 1), next(n_cells);
  const double lambda = g.dt / g.dx;
  for (int step = 0; step < g.n_steps; ++step) {
    const double t = step * g.dt;
    const double bl = g.periodic ? u.back() : boundary_value(spec, t, g.x_lo);
    const double br = g.periodic ? u.front() : boundary_value(spec, t, g.x_hi);
    for (int k = 0; k <= n_cells; ++k) {
      const double ul = k == 0 ? bl : u[k - 1];
      const double ur = k == n_cells ? br : u[k];
      double fk = godunov_flux(flux, ul, ur);
      if (nu > 0.0) {
        // Dirichlet data sits on the face: the viscous ghost is reflected.
        double vl = ul, vr = ur;
        if (!g.periodic && k == 0) vl = 2.0 * bl - u[0];
        if (!g.periodic && k == n_cells) vr = 2.0 * br - u[n_cells - 1];
        fk -= nu * (vr - vl) / g.dx;
      }
      f[k] = fk;
    }
    if (g.periodic) f[n_cells] = f[0];
    double mass0 = 0.0, mass1 = 0.0;
    for (int i = 0; i < n_cells; ++i) {
      next[i] = u[i] - lambda * (f[i + 1] - f[i]);
      mass0 += u[i];
      mass1 += next[i];
    }
    const double drift = std::abs((mass1 - mass0) * g.dx + g.dt * (f[n_cells] - f[0]));
    g.max_mass_drift = std::max(g.max_mass_drift, drift);
    u.swap(next);
    if ((step + 1) % stride == 0 || step + 1 == g.n_steps) store(step + 1);
  }
  g.times.back() = t_end;
  return g;
}

Eigen::VectorXd sample_reference(const FvGrid& g, const Eigen::MatrixXd& points) {
  if (points.rows() != 2) throw ShapeError("reference points must be (t, x) columns");
  Eigen::VectorXd out(points.cols());
  const double tol = 1e-12 * std::max(1.0, g.x_hi - g.x_lo);
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const double t = points(0, c), x = points(1, c);
    if (!(t >= -1e-14 && t <= g.t_end() + 1e-12) || !(x >= g.x_lo - tol && x <= g.x_hi + tol))
      throw DomainError("point (" + std::to_string(t) + ", " + std::to_string(x) +
                        ") outside the reference solution");
    auto it = std::upper_bound(g.times.begin(), g.times.end(), t);
    std::size_t k1 = static_cast<std::size_t>(it - g.times.begin());
    if (k1 >= g.times.size()) k1 = g.times.size() - 1;
    const std::size_t k0 = k1 == 0 ? 0 : k1 - 1;
    const double span_t = g.times[k1] - g.times[k0];
    const double at = span_t > 0.0 ? std::clamp((t - g.times[k0]) / span_t, 0.0, 1.0) : 0.0;

    auto in_space = [&](std::size_t k) {
      const std::vector<double>& row = g.cell_averages[k];
      const double s = (x - g.x_lo) / g.dx - 0.5;
      if (g.periodic) {
        const double fl = std::floor(s);
        const double a = s - fl;
        const int n = g.n_cells;
        const int i0 = ((static_cast<int>(fl) % n) + n) % n, i1 = (i0 + 1) % n;
        return (1 - a) * row[i0] + a * row[i1];
      }
      if (s < 0.0) {
        // Between the left face (boundary value) and the first center.
        const double a = (x - g.x_lo) / (0.5 * g.dx);
        return (1 - a) * g.left_values[k] + a * row[0];
      }
      if (s > g.n_cells - 1) {
        const double a = (g.x_hi - x) / (0.5 * g.dx);
        return (1 - a) * g.right_values[k] + a * row[g.n_cells - 1];
      }
      const int i0 = std::min(static_cast<int>(std::floor(s)), g.n_cells - 2);
      const double a = s - i0;
      return (1 - a) * row[i0] + a * row[i0 + 1];
    };
    out(c) = at == 0.0 ? in_space(k0) : (1 - at) * in_space(k0) + at * in_space(k1);
  }
  return out;
}

void write_fv_csv(std::ostream& out, const FvGrid& g, int level_stride) {
  out << "t,x,u\n";
  out.precision(17);
  const int stride = std::max(1, level_stride);
  for (std::size_t k = 0; k < g.times.size(); k += stride)
    for (int i = 0; i < g.n_cells; ++i) out << g.times[k] << "," << g.center(i) << "," << g.cell_averages[k][i] << "\n";
}

}  // namespace pinn
