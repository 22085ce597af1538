#include "pinn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "pinn/errors.hpp"
#include "pinn/rng.hpp"
#include "sobol_table.hpp"

namespace pinn {

std::string_view to_string(RuleKind k) {
  switch (k) {
    case RuleKind::Sobol: return "sobol";
    case RuleKind::MonteCarlo: return "monte_carlo";
    case RuleKind::GaussLegendre: return "gauss_legendre";
  }
  return "?";
}

RuleKind rule_kind_from_string(std::string_view name) {
  if (name == "sobol") return RuleKind::Sobol;
  if (name == "monte_carlo" || name == "random") return RuleKind::MonteCarlo;
  if (name == "gauss_legendre") return RuleKind::GaussLegendre;
  throw ConfigError("", "unknown sampling kind '" + std::string(name) + "'");
}

namespace {

constexpr int kBits = 32;

std::vector<std::uint32_t> direction_numbers(int dim) {
  std::vector<std::uint32_t> v(kBits + 1, 0);
  if (dim == 0) {
    for (int k = 1; k <= kBits; ++k) v[k] = 1u << (kBits - k);
    return v;
  }
  const auto& prim = detail::kSobolTable[dim - 1];
  const int s = prim.degree;
  for (int k = 1; k <= std::min(s, kBits); ++k) v[k] = prim.initial[k - 1] << (kBits - k);
  for (int k = s + 1; k <= kBits; ++k) {
    std::uint32_t x = v[k - s] ^ (v[k - s] >> s);
    for (int i = 1; i < s; ++i)
      if ((prim.coeffs >> (s - 1 - i)) & 1u) x ^= v[k - i];
    v[k] = x;
  }
  return v;
}

int rightmost_zero_bit(std::uint64_t n) {
  int c = 1;
  while (n & 1u) {
    n >>= 1;
    ++c;
  }
  return c;
}

}  // namespace

Eigen::MatrixXd sobol(int n, int d) {
  if (d < 1 || d > kSobolMaxDim)
    throw UnsupportedDimensionError("Sobol direction numbers cover dimensions 1.." +
                                    std::to_string(kSobolMaxDim) + ", got " + std::to_string(d));
  if (n < 0) throw EmptyRuleError("negative point count");
  if (static_cast<std::uint64_t>(n) >= (std::uint64_t{1} << kBits))
    throw UnsupportedDimensionError("too many Sobol points requested");
  Eigen::MatrixXd out(d, n);
  for (int j = 0; j < d; ++j) {
    const auto v = direction_numbers(j);
    std::uint32_t x = 0;
    for (int i = 0; i < n; ++i) {
      // Point i+1 of the sequence; point 0 is all zeros and skipped.
      x ^= v[rightmost_zero_bit(static_cast<std::uint64_t>(i))];
      out(j, i) = static_cast<double>(x) * 0x1.0p-32;
    }
  }
  return out;
}

Eigen::MatrixXd uniform_random(int n, int d, std::uint64_t seed) {
  if (n < 0 || d < 1) throw EmptyRuleError("bad sample shape");
  Rng rng(seed);
  Eigen::MatrixXd out(d, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) out(j, i) = rng.uniform();
  return out;
}

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw EmptyRuleError("Gauss-Legendre rule needs at least one node");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    nodes(i) = -x;
    nodes(n - 1 - i) = x;
    weights(i) = weights(n - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1) nodes(n / 2) = 0.0;
}

QuadratureRule gauss_legendre_composite(int cells_per_axis, int nodes_per_cell, const Box& box) {
  if (cells_per_axis < 1 || nodes_per_cell < 1) throw EmptyRuleError("empty Gauss-Legendre rule");
  const int d = box.dim();
  Eigen::VectorXd x, w;
  gauss_legendre(nodes_per_cell, x, w);
  const int per_axis = cells_per_axis * nodes_per_cell;
  // 1D composite nodes and weights on each axis.
  std::vector<Eigen::VectorXd> ax(d), aw(d);
  for (int a = 0; a < d; ++a) {
    const double h = box.extent(a) / cells_per_axis;
    ax[a].resize(per_axis);
    aw[a].resize(per_axis);
    for (int c = 0; c < cells_per_axis; ++c)
      for (int q = 0; q < nodes_per_cell; ++q) {
        ax[a](c * nodes_per_cell + q) = box.lo[a] + h * (c + 0.5 * (x(q) + 1.0));
        aw[a](c * nodes_per_cell + q) = 0.5 * h * w(q);
      }
  }
  long total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  QuadratureRule rule;
  rule.kind = RuleKind::GaussLegendre;
  rule.rate_alpha = 2.0 * nodes_per_cell / d;
  rule.points.resize(d, total);
  rule.weights.resize(total);
  rule.labels.assign(total, -1);
  std::vector<int> idx(d, 0);
  for (long n = 0; n < total; ++n) {
    double wt = 1.0;
    for (int a = 0; a < d; ++a) {
      rule.points(a, n) = ax[a](idx[a]);
      wt *= aw[a](idx[a]);
    }
    rule.weights(n) = wt;
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < per_axis) break;
      idx[a] = 0;
    }
  }
  return rule;
}

namespace {

// Unit-cube points strictly inside (0,1)^d.
Eigen::MatrixXd unit_points(RuleKind kind, int n, int d, std::uint64_t seed, std::uint64_t stream) {
  if (kind == RuleKind::Sobol) return sobol(n, d);
  Rng rng = Rng(seed).split(stream);
  Eigen::MatrixXd out(d, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      double u = rng.uniform();
      while (u == 0.0) u = rng.uniform();
      out(j, i) = u;
    }
  return out;
}

}  // namespace

QuadratureRule box_rule(RuleKind kind, int n, const Box& box, std::uint64_t seed,
                        std::uint64_t stream) {
  if (n <= 0) throw EmptyRuleError("point count must be positive");
  const int d = box.dim();
  if (kind == RuleKind::GaussLegendre) {
    constexpr int nodes = 2;
    const int cells = std::max(
        1, static_cast<int>(std::lround(std::pow(static_cast<double>(n), 1.0 / d) / nodes)));
    return gauss_legendre_composite(cells, nodes, box);
  }
  QuadratureRule rule;
  rule.kind = kind;
  rule.rate_alpha = kind == RuleKind::Sobol ? 1.0 : 0.5;
  rule.points = box.map_from_unit(unit_points(kind, n, d, seed, stream));
  rule.weights = Eigen::VectorXd::Constant(n, box.measure() / n);
  rule.labels.assign(n, -1);
  return rule;
}

namespace {

void append(QuadratureRule& to, const QuadratureRule& from) {
  const Eigen::Index n0 = to.points.cols();
  if (n0 == 0) {
    to.points = from.points;
    to.weights = from.weights;
    to.labels = from.labels;
    return;
  }
  to.points.conservativeResize(Eigen::NoChange, n0 + from.points.cols());
  to.points.rightCols(from.points.cols()) = from.points;
  to.weights.conservativeResize(n0 + from.weights.size());
  to.weights.tail(from.weights.size()) = from.weights;
  to.labels.insert(to.labels.end(), from.labels.begin(), from.labels.end());
}

// Largest-remainder split of n over the given shares.
std::vector<int> apportion(int n, const std::vector<double>& shares) {
  const double total = [&] {
    double s = 0;
    for (double v : shares) s += v;
    return s;
  }();
  std::vector<int> out(shares.size());
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double exact = n * shares[i] / total;
    out[i] = static_cast<int>(std::floor(exact));
    used += out[i];
    rem.emplace_back(exact - out[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (int k = 0; k < n - used; ++k) ++out[rem[k].second];
  return out;
}

// Box with axis `skip` removed, time first.
Box face_box(const Geometry& g, int axis) {
  std::vector<double> lo{0.0}, hi{g.t_final};
  for (int b = 0; b < g.spatial_dim(); ++b) {
    if (b == axis) continue;
    lo.push_back(g.space.lo[b]);
    hi.push_back(g.space.hi[b]);
  }
  return Box(lo, hi);
}

// Reinserts the fixed face coordinate into face points.
Eigen::MatrixXd lift_face(const Eigen::MatrixXd& face_pts, int axis, double value) {
  const Eigen::Index dbar = face_pts.rows() + 1;
  Eigen::MatrixXd out(dbar, face_pts.cols());
  Eigen::Index src = 0;
  for (Eigen::Index r = 0; r < dbar; ++r) {
    if (r == 1 + axis)
      out.row(r).setConstant(value);
    else
      out.row(r) = face_pts.row(src++);
  }
  return out;
}

}  // namespace

TrainingSet build_training_set(const Geometry& geometry, int n_int, int n_sb, int n_tb,
                               RuleKind kind, std::uint64_t seed) {
  if (n_int <= 0 || n_sb <= 0 || n_tb <= 0)
    throw EmptyRuleError("training set counts must all be positive");
  const int d = geometry.spatial_dim();
  TrainingSet set;
  set.interior = box_rule(kind, n_int, geometry.space_time(), seed, 1);

  // Spatial boundary: faces ordered by label 2*axis + side.
  std::vector<int> face_axis, face_side;
  std::vector<double> face_measure;
  for (int a = 0; a < d; ++a)
    for (int side = 0; side < (geometry.periodic ? 1 : 2); ++side) {
      face_axis.push_back(a);
      face_side.push_back(side);
      face_measure.push_back(d == 1 ? geometry.t_final : face_box(geometry, a).measure());
    }
  const std::vector<int> counts = apportion(n_sb, face_measure);
  set.spatial_boundary.kind = kind;
  for (std::size_t f = 0; f < counts.size(); ++f) {
    if (counts[f] == 0) continue;
    const int a = face_axis[f];
    const Box fb = face_box(geometry, a);
    QuadratureRule face = box_rule(kind, counts[f], fb, seed, 16 + f);
    const double coord = face_side[f] == 0 ? geometry.space.lo[a] : geometry.space.hi[a];
    face.points = lift_face(face.points, a, coord);
    face.labels.assign(face.size(), 2 * a + face_side[f]);
    set.spatial_boundary.rate_alpha = face.rate_alpha;
    if (geometry.periodic) {
      Eigen::MatrixXd partner = face.points;
      partner.row(1 + a).setConstant(geometry.space.hi[a]);
      const Eigen::Index n0 = set.sb_partner.cols();
      set.sb_partner.conservativeResize(d + 1, n0 + partner.cols());
      set.sb_partner.rightCols(partner.cols()) = partner;
    }
    append(set.spatial_boundary, face);
  }

  QuadratureRule tb = box_rule(kind, n_tb, geometry.space, seed, 2);
  set.temporal_boundary.kind = tb.kind;
  set.temporal_boundary.rate_alpha = tb.rate_alpha;
  set.temporal_boundary.points.resize(d + 1, tb.size());
  set.temporal_boundary.points.row(0).setZero();
  set.temporal_boundary.points.bottomRows(d) = tb.points;
  set.temporal_boundary.weights = tb.weights;
  set.temporal_boundary.labels = tb.labels;
  return set;
}

void write_training_set_csv(std::ostream& out, const TrainingSet& set) {
  const Eigen::Index dbar = set.interior.points.rows();
  out << "t";
  for (Eigen::Index j = 1; j < dbar; ++j) out << ",x" << j;
  out << ",weight,set\n";
  out.precision(17);
  auto dump = [&](const QuadratureRule& r, const char* name) {
    for (int n = 0; n < r.size(); ++n) {
      for (Eigen::Index j = 0; j < dbar; ++j) out << r.points(j, n) << ",";
      out << r.weights(n) << "," << name << "\n";
    }
  };
  dump(set.interior, "int");
  dump(set.spatial_boundary, "sb");
  dump(set.temporal_boundary, "tb");
}

}  // namespace pinn
