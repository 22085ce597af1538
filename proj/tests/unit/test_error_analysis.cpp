#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "pinn/error_analysis.hpp"
#include "pinn/errors.hpp"
#include "pinn/rng.hpp"

using namespace pinn;

namespace {

Model make_model(const ProblemSpec& spec, int depth, int width, Activation act, std::uint64_t seed) {
  return Model(init_params(seed, layer_dims_for(spec, {depth, width, act}), act),
               InputMap::to_symmetric_cube(spec.geometry.space_time()));
}

Model zero_model(const ProblemSpec& spec) {
  Model m = make_model(spec, 1, 4, Activation::Tanh, 1);
  for (double& v : m.params.flat()) v = 0.0;
  return m;
}

/// (u, v, p) = (-y, x, 0)
class RigidRotation : public AnalyticField {
 public:
  int input_dim() const override { return 3; }
  int output_dim() const override { return 3; }
  Jet jet(std::span<const double> y) const override {
    Jet j;
    j.value = Eigen::Vector3d(-y[2], y[1], 0.0);
    j.grad = Eigen::MatrixXd::Zero(3, 3);
    j.grad(0, 2) = -1.0;
    j.grad(1, 1) = 1.0;
    j.hess_diag = Eigen::MatrixXd::Zero(3, 3);
    return j;
  }
};

/// Constant vector field over (t, x, y).
class ConstantFlow : public AnalyticField {
 public:
  explicit ConstantFlow(Eigen::Vector3d v) : v_(v) {}
  int input_dim() const override { return 3; }
  int output_dim() const override { return 3; }
  Jet jet(std::span<const double>) const override {
    return {v_, Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3)};
  }

 private:
  Eigen::Vector3d v_;
};

/// The 1d heat solution plus c t: interior residual is the constant c.
class ShiftedHeat : public AnalyticField {
 public:
  explicit ShiftedHeat(double c) : c_(c) {}
  int input_dim() const override { return 2; }
  int output_dim() const override { return 1; }
  Jet jet(std::span<const double> y) const override {
    Jet j = base_.jet(y);
    j.value(0) += c_ * y[0];
    j.grad(0, 0) += c_;
    return j;
  }

 private:
  Heat1dExact base_;
  double c_;
};

ValidationReport filled_report(double v) {
  ValidationReport r;
  r.k_sets = 1;
  r.draws = 1;
  r.e_train.fill(v);
  r.e_val.fill(v);
  r.gap.fill(v);
  r.residual_std.fill(v);
  r.n_train = {64, 64, 512, 0};
  return r;
}

}  // namespace

TEST_CASE("training error components") {
  SUBCASE("zero residuals") {
    const TrainingErrorReport r = training_error(LossBreakdown{}, {}, ProblemKind::Heat);
    CHECK(r.e_tb == 0.0);
    CHECK(r.e_sb == 0.0);
    CHECK(r.e_int == 0.0);
    CHECK(r.e_total == 0.0);
  }
  SUBCASE("single initial point with residual 3") {
    ResidualBundle res;
    res.temporal_boundary = Eigen::MatrixXd::Constant(1, 1, 3.0);
    TrainingSet sets;
    sets.temporal_boundary.points = Eigen::MatrixXd::Zero(2, 1);
    sets.temporal_boundary.weights = Eigen::VectorXd::Ones(1);
    const LossBreakdown b = breakdown_from_residuals(res, sets, {}, 2);
    CHECK(training_error(b, {}, ProblemKind::Heat).e_tb == 3.0);
  }
  SUBCASE("family identities") {
    LossBreakdown b;
    b.tb = 0.25, b.sb = 0.5, b.interior = 2.0, b.div = 3.0;
    const TrainingErrorReport h = training_error(b, {1.0, 2, 0.0}, ProblemKind::Heat);
    CHECK(h.e_total * h.e_total == doctest::Approx(h.e_tb * h.e_tb + h.e_sb * h.e_sb + h.e_int * h.e_int));
    const TrainingErrorReport c = training_error(b, {0.1, 2, 0.0}, ProblemKind::ConservationLaw);
    CHECK(c.e_total * c.e_total == doctest::Approx(0.25 + 0.5 + 0.1 * 2.0));
    // lambda on the divergence only
    const TrainingErrorReport e = training_error(b, {0.1, 2, 0.0}, ProblemKind::Euler);
    CHECK(e.e_total * e.e_total == doctest::Approx(0.25 + 0.5 + 2.0 + 0.1 * 3.0));
    CHECK(e.e_div == doctest::Approx(std::sqrt(3.0)));
  }
}

TEST_CASE("training error is invariant under point permutation") {
  const ProblemSpec spec = burgers_sine(0.01 / M_PI);
  const TrainingSet sets = build_training_set(spec.geometry, 200, 40, 40, RuleKind::MonteCarlo, 3);
  TrainingSet perm = sets;
  auto shuffle = [](QuadratureRule& q, std::uint64_t seed) {
    std::vector<int> idx(static_cast<std::size_t>(q.size()));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed, 0);
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.uniform(0.0, double(i)))]);
    QuadratureRule out = q;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.points.col(Eigen::Index(i)) = q.points.col(idx[i]);
      out.weights(Eigen::Index(i)) = q.weights(idx[i]);
      if (!q.labels.empty()) out.labels[i] = q.labels[static_cast<std::size_t>(idx[i])];
    }
    q = out;
  };
  shuffle(perm.interior, 1);
  shuffle(perm.spatial_boundary, 2);
  shuffle(perm.temporal_boundary, 3);
  const Model m = make_model(spec, 2, 8, Activation::Tanh, 4);
  const LossConfig cfg{0.5, 2, 0.0};
  const TrainingErrorReport a = training_error(assemble_loss(m, spec, sets, cfg), cfg, spec.kind);
  const TrainingErrorReport b = training_error(assemble_loss(m, spec, perm, cfg), cfg, spec.kind);
  CHECK(b.e_total == doctest::Approx(a.e_total).epsilon(1e-13));
  CHECK(b.e_int == doctest::Approx(a.e_int).epsilon(1e-13));
  REQUIRE(b.e_sb_faces.size() == 2);
  CHECK(b.e_sb_faces[0] == doctest::Approx(a.e_sb_faces[0]).epsilon(1e-13));
  CHECK(b.e_sb_faces[1] == doctest::Approx(a.e_sb_faces[1]).epsilon(1e-13));
}

TEST_CASE("generalization error") {
  const Box box = Box::cube(2, 0.0, 1.0);
  const FieldEvaluator truth = [](const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
    return (p.row(0).array() * p.row(1).array().sin()).matrix();
  };
  const FieldEvaluator shifted = [&](const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
    return truth(p).array() + 1.0;
  };
  const FieldEvaluator other = [](const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
    return p.row(1).array().square().matrix();
  };

  CHECK(generalization_error(truth, truth, box, 1000, 1).e_g == 0.0);
  const GeneralizationReport off = generalization_error(shifted, truth, box, 10000, 2);
  CHECK(std::abs(off.e_g - 1.0) <= 0.01);
  CHECK(off.e_g_rel == doctest::Approx(100.0 * off.e_g / off.truth_norm));
  CHECK(off.n_test == 10000);

  // Same seed, same points: exact symmetry and triangle inequality.
  const double ab = generalization_error(shifted, other, box, 5000, 9).e_g;
  const double ba = generalization_error(other, shifted, box, 5000, 9).e_g;
  CHECK(ab == ba);
  const double ac = generalization_error(shifted, truth, box, 5000, 9).e_g;
  const double cb = generalization_error(truth, other, box, 5000, 9).e_g;
  CHECK(ab <= ac + cb + 1e-12);

  // Deterministic per seed.
  CHECK(generalization_error(other, truth, box, 3000, 4).e_g == generalization_error(other, truth, box, 3000, 4).e_g);
  CHECK_THROWS_AS(generalization_error(truth, truth, box, 0, 1), EmptyRuleError);
}

TEST_CASE("generalization error compares only the requested rows") {
  const auto tv = std::make_shared<TaylorVortexExact>(4.0, 0.0);
  const FieldEvaluator wrong_pressure = [&](const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
    Eigen::MatrixXd v = tv->values(p);
    v.row(2).array() += 5.0;
    return v;
  };
  const Box box = taylor_vortex().geometry.space_time();
  CHECK(generalization_error(wrong_pressure, field_of(tv), box, 2000, 3, 2).e_g == 0.0);
  CHECK(generalization_error(wrong_pressure, field_of(tv), box, 2000, 3).e_g > 1.0);
}

TEST_CASE("heat constants") {
  CHECK(heat_c1(0.0, 1.0) == doctest::Approx(1.9283).epsilon(1e-4));
  CHECK(heat_c1(0.0, 1.0) == doctest::Approx(std::sqrt(1.0 + std::exp(1.0))));
  // C1 grows with the source Lipschitz constant.
  CHECK(heat_c1(0.5, 1.0) > heat_c1(0.0, 1.0));
}

TEST_CASE("validation statistics") {
  const ProblemSpec spec = heat_1d();
  const TrainingSet train = build_training_set(spec.geometry, 256, 32, 32, RuleKind::MonteCarlo, 1);
  const Model m = make_model(spec, 2, 6, Activation::Tanh, 2);
  const ModelSource src(m);
  const JetSource* ptr = &src;
  const std::span<const JetSource* const> one(&ptr, 1);

  SUBCASE("identical train and validation points give no gap") {
    const ValidationReport r = validation_report(spec, one, std::span(&train, 1), std::span(&train, 1));
    for (int t = 0; t < 3; ++t) {
      CHECK(r.gap[t] == 0.0);
      CHECK(r.e_val[t] == r.e_train[t]);
    }
    CHECK(r.e_train[2] > 0.0);
    CHECK(r.n_train[0] == 32);
    CHECK(r.n_train[2] == 256);
  }
  SUBCASE("constant residual has zero spread") {
    const ShiftedHeat field(0.7);
    const JetSource* f = &field;
    const TrainingSet val = build_training_set(spec.geometry, 512, 64, 64, RuleKind::MonteCarlo, 9);
    const ValidationReport r = validation_report(spec, std::span<const JetSource* const>(&f, 1),
                                                 std::span(&train, 1), std::span(&val, 1));
    CHECK(r.residual_std[static_cast<int>(Term::Int)] <= 1e-12);
    CHECK(r.residual_std[static_cast<int>(Term::Tb)] <= 1e-12);
    // sqrt(|D x (0,T)| c^2) on both draws
    CHECK(r.e_train[static_cast<int>(Term::Int)] == doctest::Approx(0.7 * std::sqrt(2.0)));
    CHECK(r.gap[static_cast<int>(Term::Int)] <= 1e-6);
    CHECK(r.residual_std[static_cast<int>(Term::Sb)] > 0.0);
  }
  SUBCASE("averaging over models") {
    const Model m2 = make_model(spec, 2, 6, Activation::Tanh, 3);
    const TrainingSet train2 = build_training_set(spec.geometry, 256, 32, 32, RuleKind::MonteCarlo, 2);
    const TrainingSet val = build_training_set(spec.geometry, 256, 32, 32, RuleKind::MonteCarlo, 7);
    const std::vector<Model> models{m, m2};
    const std::vector<TrainingSet> sets{train, train2};
    const ValidationReport both = validation_report(spec, std::span<const Model>(models), sets, std::span(&val, 1));
    const ValidationReport a = validation_report(spec, std::span<const Model>(&models[0], 1),
                                                 std::span(&sets[0], 1), std::span(&val, 1));
    const ValidationReport b = validation_report(spec, std::span<const Model>(&models[1], 1),
                                                 std::span(&sets[1], 1), std::span(&val, 1));
    CHECK(both.k_sets == 2);
    for (int t = 0; t < 3; ++t) {
      CHECK(both.e_train[t] == doctest::Approx(0.5 * (a.e_train[t] + b.e_train[t])));
      CHECK(both.e_val[t] == doctest::Approx(0.5 * (a.e_val[t] + b.e_val[t])));
      CHECK(both.gap[t] >= 0.0);
    }
  }
  SUBCASE("no models is an error") {
    CHECK_THROWS_AS(validation_report(spec, std::span<const JetSource* const>(), {}, std::span(&train, 1)),
                    ConfigError);
  }
}

TEST_CASE("heat bound") {
  const ProblemSpec spec = heat_1d();
  const TrainingSet mc = build_training_set(spec.geometry, 128, 16, 16, RuleKind::MonteCarlo, 1);
  const Model m = make_model(spec, 2, 6, Activation::Tanh, 2);
  const SupNormSampling few{2000, 2000, 5};

  SUBCASE("vanishing inputs give a vanishing bound") {
    const BoundReport r = heat_bound(spec, std::span(&m, 1), std::span(&mc, 1), filled_report(0.0),
                                     *spec.exact, 0.0, few);
    CHECK(r.bound_total == 0.0);
    CHECK(r.constant("C1") == doctest::Approx(std::sqrt(1.0 + std::exp(1.0))));
    CHECK(r.constant("C_f") == 0.0);
  }
  SUBCASE("boundary constant from sampled sup norms") {
    const BoundReport r = heat_bound(spec, std::span(&m, 1), std::span(&mc, 1), filled_report(0.01),
                                     *spec.exact, 0.0, {2000, 10000, 5});
    // On x = +-1 the exact solution vanishes and |u_x| peaks at pi for t = 0.
    double exact_c1 = 0.0, net_c1 = 0.0;
    for (const auto& [k, v] : r.diagnostics) {
      if (k == "exact_C1_boundary") exact_c1 = v;
      if (k == "network_C1_boundary") net_c1 = v;
    }
    CHECK(exact_c1 <= M_PI + 1e-12);
    CHECK(exact_c1 >= 0.99 * M_PI);
    CHECK(r.constant("C_dD") == doctest::Approx(std::sqrt(2.0) * (exact_c1 + net_c1)));
    CHECK(r.constant("C2") == doctest::Approx(std::sqrt(r.constant("C_dD"))));
    for (const auto& [k, v] : r.constants) CHECK(v >= 0.0);
    double s = 0.0;
    for (const auto& [k, v] : r.terms) s += v;
    CHECK(r.bound_total == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
  }
  SUBCASE("bound is monotone in every input") {
    const ValidationReport base = filled_report(0.01);
    const double b0 =
        heat_bound(spec, std::span(&m, 1), std::span(&mc, 1), base, *spec.exact, 0.0, few).bound_total;
    for (int t = 0; t < 3; ++t) {
      for (auto field : {&ValidationReport::e_train, &ValidationReport::gap, &ValidationReport::residual_std}) {
        ValidationReport up = base;
        (up.*field)[t] *= 2.0;
        const double b1 =
            heat_bound(spec, std::span(&m, 1), std::span(&mc, 1), up, *spec.exact, 0.0, few).bound_total;
        CHECK(b1 > b0);
      }
    }
  }
  SUBCASE("deterministic points are refused") {
    const TrainingSet sobol = build_training_set(spec.geometry, 128, 16, 16, RuleKind::Sobol, 1);
    CHECK_THROWS_AS(heat_bound(spec, std::span(&m, 1), std::span(&sobol, 1), filled_report(0.0), *spec.exact,
                               0.0, few),
                    DomainError);
  }
  SUBCASE("single-run training part") {
    const BoundReport r = heat_training_bound(spec, m, mc, *spec.exact, 0.0, few);
    const LossBreakdown b = assemble_loss(m, spec, mc, {});
    const double c1 = r.constant("C1"), c2 = r.constant("C2");
    CHECK(r.bound_total ==
          doctest::Approx(c1 * std::sqrt(b.tb + b.interior + c2 * c2 * std::sqrt(b.sb))).epsilon(1e-12));
    CHECK(r.form == "training-error part");
  }
}

TEST_CASE("conservation-law bound") {
  SUBCASE("Burgers flux makes C_fuu the sup of u_x") {
    const ProblemSpec spec = burgers_sine(0.01 / M_PI);
    const auto grid = std::make_shared<const FvGrid>(fv_solve(spec, 256, 1.0, kReferenceCfl));
    const TrainingSet sets = build_training_set(spec.geometry, 128, 32, 32, RuleKind::Sobol, 1);
    const Model m = make_model(spec, 2, 6, Activation::Tanh, 1);
    const BoundReport r = burgers_bound(spec, m, sets, scalar_truth(grid), 0.0, {5000, 1000, 2});
    double ux = -1.0;
    for (const auto& [k, v] : r.diagnostics)
      if (k == "ux_sup") ux = v;
    CHECK(r.constant("C_fuu") == ux);
    CHECK(r.constant("C") == 1.0 + 2.0 * ux);
    CHECK(std::isfinite(r.bound_total));
    for (const auto& [k, v] : r.constants) CHECK(v >= 0.0);
    double s = 0.0;
    for (const auto& [k, v] : r.terms) s += v;
    CHECK(r.bound_total == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
    // Cbar_b is max |f'(s)| = max |s| on the attained range.
    double u_sup = 0.0;
    for (const auto& [k, v] : r.diagnostics)
      if (k == "u_sup") u_sup = v;
    CHECK(r.constant("Cbar_b") >= u_sup - 1e-12);
    CHECK(std::none_of(r.flags.begin(), r.flags.end(), [](const std::string& f) { return f.find("unreliable") != std::string::npos; }));
  }
  SUBCASE("inviscid shock is flagged, rarefaction is not") {
    auto flagged = [](const BoundReport& r) {
      return std::any_of(r.flags.begin(), r.flags.end(),
                         [](const std::string& f) { return f == "constants unreliable: ||u_x||_inf diverges"; });
    };
    auto final_ux = [](const BoundReport& r) {
      for (const auto& [k, v] : r.diagnostics)
        if (k == "ux_sup_final_time") return v;
      return -1.0;
    };
    const ProblemSpec shock = burgers_sine(0.0);
    const auto g_shock = std::make_shared<const FvGrid>(fv_solve(shock, 512, 1.0, kReferenceCfl));
    const TrainingSet s1 = build_training_set(shock.geometry, 64, 16, 16, RuleKind::Sobol, 1);
    const Model m1 = make_model(shock, 1, 4, Activation::Tanh, 1);
    const BoundReport rs = burgers_bound(shock, m1, s1, scalar_truth(g_shock), 0.0, {2000, 100, 1});
    CHECK(flagged(rs));

    const ProblemSpec rare = burgers_rarefaction(0.0);
    const auto g_rare = std::make_shared<const FvGrid>(fv_solve(rare, 512, 0.5, kReferenceCfl));
    const TrainingSet s2 = build_training_set(rare.geometry, 64, 16, 16, RuleKind::Sobol, 1);
    const Model m2 = make_model(rare, 1, 4, Activation::Tanh, 1);
    const BoundReport rr = burgers_bound(rare, m2, s2, scalar_truth(g_rare), 0.0, {2000, 100, 1});
    CHECK_FALSE(flagged(rr));
    // The fan has slope 1/t = 2 at the final time, plus the O(1) sonic-point
    // kink of the Godunov flux; the shock slope grows like 1/dx.
    CHECK(final_ux(rr) >= 1.9);
    CHECK(final_ux(rr) <= 4.0);
    CHECK(final_ux(rs) > 10.0 * final_ux(rr));
  }
  SUBCASE("analytic truth derivative") {
    const ScalarTruth t = scalar_truth(std::shared_ptr<const AnalyticField>(std::make_shared<RarefactionExact>()));
    Eigen::MatrixXd p(2, 2);
    p << 0.5, 0.5, 0.2, 0.7;
    const Eigen::MatrixXd dx = t.dx(p);
    CHECK(dx(0, 0) == doctest::Approx(2.0));
    CHECK(dx(0, 1) == doctest::Approx(0.0));
  }
}

TEST_CASE("Euler bound") {
  SUBCASE("zero flow with zero residuals") {
    ProblemSpec spec = taylor_vortex();
    spec.initial_data = [](std::span<const double>) { return Eigen::VectorXd::Zero(2); };
    spec.forcing = nullptr;
    const TrainingSet sets = build_training_set(spec.geometry, 128, 32, 32, RuleKind::Sobol, 1);
    const ConstantFlow still(Eigen::Vector3d::Zero());
    const BoundReport r = euler_bound(spec, zero_model(spec), sets, still, 0.0, {1000, 100, 1});
    CHECK(r.bound_total == 0.0);
    CHECK(r.constant("C_inf") == 1.0);
  }
  SUBCASE("Taylor vortex gradient sup against the analytic maximum") {
    const ProblemSpec spec = taylor_vortex();
    const TrainingSet sets = build_training_set(spec.geometry, 128, 32, 32, RuleKind::Sobol, 1);
    const Model m = make_model(spec, 2, 6, Activation::Celu, 1);
    const BoundReport r = euler_bound(spec, m, sets, *spec.exact, 0.0, {100000, 100, 3});
    // max |d u_i / d x_j| is |du/dy| at the vortex centre, sqrt(e).
    const double peak = std::sqrt(std::exp(1.0));
    const double sampled = (r.constant("C_inf") - 1.0) / 4.0;
    CHECK(sampled <= peak + 1e-12);
    CHECK(sampled >= 0.95 * peak);
    CHECK(r.constant("C_d") == 2.0);
    for (const auto& [k, v] : r.constants) CHECK(v >= 0.0);
    double s = 0.0;
    for (const auto& [k, v] : r.terms) s += v;
    CHECK(r.bound_total == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
  }
}

TEST_CASE("vorticity") {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Random(3, 300);
  pts.row(0) = pts.row(0).cwiseAbs();
  SUBCASE("rigid rotation") {
    const Eigen::VectorXd w = vorticity_field(RigidRotation(), pts);
    for (double v : w) CHECK(v == 2.0);
  }
  SUBCASE("constant flow") {
    const Eigen::VectorXd w = vorticity_field(ConstantFlow({1.0, -2.0, 3.0}), pts);
    CHECK(w.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("Taylor vortex initial data") {
    Eigen::MatrixXd p = 3.0 * Eigen::MatrixXd::Random(3, 500);
    p.row(0).setZero();
    const Eigen::VectorXd w = vorticity_field(TaylorVortexExact(4.0, 0.0), p);
    for (Eigen::Index n = 0; n < p.cols(); ++n) {
      const double x = p(1, n), y = p(2, n);
      // curl of (-y e, x e) with e = exp((1 - x^2 - y^2)/2)
      const double expected = (2.0 - x * x - y * y) * std::exp(0.5 * (1.0 - x * x - y * y));
      CHECK(std::abs(w(n) - expected) <= 1e-8);
    }
  }
  SUBCASE("trained-style model matches finite differences") {
    const ProblemSpec spec = taylor_vortex();
    const Model m = make_model(spec, 2, 8, Activation::Celu, 3);
    const ModelSource src(m);
    const Eigen::VectorXd w = vorticity_field(src, pts);
    const double h = 1e-5;
    for (int n = 0; n < 20; ++n) {
      Eigen::MatrixXd q(3, 4);
      for (int k = 0; k < 4; ++k) q.col(k) = pts.col(n);
      q(1, 0) += h, q(1, 1) -= h, q(2, 2) += h, q(2, 3) -= h;
      const Eigen::MatrixXd v = m.evaluate(q);
      const double fd = (v(1, 0) - v(1, 1)) / (2 * h) - (v(0, 2) - v(0, 3)) / (2 * h);
      CHECK(w(n) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  SUBCASE("scalar fields are refused") {
    CHECK_THROWS_AS(vorticity_field(Heat1dExact(), pts.topRows(2)), UnsupportedDimensionError);
  }
}

TEST_CASE("report serialization") {
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(json_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(json_number(std::nan("")) == "nan");
  CHECK(json_number(1.5) == 1.5);
  BoundReport r;
  r.family = "heat";
  r.terms = {{"a", 1.0}, {"b", std::numeric_limits<double>::infinity()}};
  r.bound_total = bound_from_terms(r.terms);
  const nlohmann::json j = to_json(r);
  CHECK(j["terms"]["a"] == 1.0);
  CHECK(j["bound_total"] == "inf");
  const nlohmann::json g = to_json(GeneralizationReport{0.5, 1.0, 0.5, 10, 3});
  CHECK(g["n_test"] == 10);
  CHECK(g["seed"] == 3);
}
