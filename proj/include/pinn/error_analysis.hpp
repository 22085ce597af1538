#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "pinn/fv.hpp"
#include "pinn/model.hpp"
#include "pinn/problem.hpp"
#include "pinn/trainer.hpp"

namespace pinn {

/// Maps a d x B matrix of (t, x) points to m x B values.
using FieldEvaluator = std::function<Eigen::MatrixXd(const Eigen::MatrixXd& points)>;

FieldEvaluator field_of(const Model& model);
FieldEvaluator field_of(std::shared_ptr<const AnalyticField> field);
FieldEvaluator field_of(std::shared_ptr<const FvGrid> grid);

/// Square roots of the weighted squared-residual sums and the total error
/// of the problem family:
///   heat, conservation law: e^2 = tb + sb + lambda int
///   Euler:                  e^2 = tb + sb + u + lambda div
/// The Euler form weights only the divergence by lambda, unlike the loss.
struct TrainingErrorReport {
  ProblemKind kind = ProblemKind::Heat;
  double e_tb = 0.0, e_sb = 0.0, e_int = 0.0, e_div = 0.0;
  std::vector<double> e_sb_faces;
  double e_total = 0.0;
};

TrainingErrorReport training_error(const LossBreakdown& b, const LossConfig& cfg, ProblemKind kind);

struct GeneralizationReport {
  double e_g = 0.0;
  /// 100 e_g / ||truth|| over the same test points.
  double e_g_rel = 0.0;
  double truth_norm = 0.0;
  int n_test = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo L2 distance over `box` using n_test uniform points drawn from
/// `seed`. Only the first `components` rows are compared (0 = all rows of the
/// truth).
GeneralizationReport generalization_error(const FieldEvaluator& candidate, const FieldEvaluator& truth,
                                          const Box& box, int n_test, std::uint64_t seed, int components = 0);

/// Residual terms in a fixed order.
enum class Term { Tb = 0, Sb = 1, Int = 2, Div = 3 };
inline constexpr int kTermCount = 4;
std::string_view to_string(Term t);

/// Training/validation statistics over k independently drawn training sets,
/// one trained model per set.
struct ValidationReport {
  int k_sets = 0;
  int draws = 0;
  bool has_div = false;
  /// Cumulative training error per term: mean over sets of sqrt(sum w R^2).
  std::array<double, kTermCount> e_train{};
  /// Same quantity on the validation points, averaged over draws.
  std::array<double, kTermCount> e_val{};
  /// sqrt of the draw average of |e_train^2 - e_val^2|.
  std::array<double, kTermCount> gap{};
  /// |D| times the sample standard deviation over validation points of the
  /// set-averaged squared residual, averaged over draws. The Monte Carlo error
  /// of sum w R^2 is about residual_std / sqrt(N).
  std::array<double, kTermCount> residual_std{};
  /// Points per term in the training sets.
  std::array<int, kTermCount> n_train{};
};

/// `validation` holds one or more independent draws shared by every model.
ValidationReport validation_report(const ProblemSpec& spec, std::span<const JetSource* const> models,
                                   std::span<const TrainingSet> training,
                                   std::span<const TrainingSet> validation);
ValidationReport validation_report(const ProblemSpec& spec, std::span<const Model> models,
                                   std::span<const TrainingSet> training,
                                   std::span<const TrainingSet> validation);

struct BoundReport {
  std::string family;
  /// "random points" for the std-based heat bound, "training-error part"
  /// when quadrature terms are left out.
  std::string form;
  std::vector<std::pair<std::string, double>> constants;
  /// Additive contributions to the squared bound.
  std::vector<std::pair<std::string, double>> terms;
  double bound_total = 0.0;
  double measured_e_g = 0.0;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<std::string> flags;

  double constant(std::string_view name) const;
  double term(std::string_view name) const;
};

/// sqrt of the sum of `terms`.
double bound_from_terms(const std::vector<std::pair<std::string, double>>& terms);

/// Sample sizes of the sup-norm estimates. They are lower estimates of the
/// true suprema.
struct SupNormSampling {
  int n_interior = 100000;
  int n_boundary = 10000;
  std::uint64_t seed = 4242;
};

/// C1 = sqrt(T + (1 + 2 C_f) T^2 exp((1 + 2 C_f) T))
double heat_c1(double c_f, double t_final);

/// Random-points heat bound:
///   E_G^2 <= C1^2 (E_tb^2 + G_tb^2 + E_int^2 + G_int^2 + C2^2 (E_sb + G_sb))
///          + C1^2 (std_tb / N_tb^(1/2) + std_int / N_int^(1/2) + C2^2 sqrt(std_sb) / N_sb^(1/4))
/// with C2 = sqrt(C_dD T^(1/2)) and C_dD = |dD|^(1/2) (|u|_C1 + |u*|_C1) on the
/// lateral boundary. Throws DomainError unless all training sets are Monte Carlo.
BoundReport heat_bound(const ProblemSpec& spec, std::span<const Model> models,
                       std::span<const TrainingSet> training, const ValidationReport& validation,
                       const AnalyticField& exact, double measured_e_g, const SupNormSampling& sampling = {});

/// Training-error part for a single deterministic-rule run:
///   E_G^2 <= C1^2 (E_tb^2 + E_int^2 + C2^2 E_sb)
BoundReport heat_training_bound(const ProblemSpec& spec, const Model& model, const TrainingSet& sets,
                                const AnalyticField& exact, double measured_e_g,
                                const SupNormSampling& sampling = {});

/// Reference solution of a scalar law with its x-derivative.
struct ScalarTruth {
  FieldEvaluator value;
  FieldEvaluator dx;
};
ScalarTruth scalar_truth(std::shared_ptr<const FvGrid> grid);
ScalarTruth scalar_truth(std::shared_ptr<const AnalyticField> field);

/// Training-error part of the conservation-law bound:
///   E_G^2 <= (T + C T^2 e^(CT)) (E_tb^2 + E_int^2 + 2 Cbar_b (E_sb0^2 + E_sb1^2)
///                                 + 2 nu C_b T^(1/2) (E_sb0 + E_sb1))
/// C = 1 + 2 |f''(max(|u|,|u*|))| |u_x|, C_b = |u_x| + |u*_x|,
/// Cbar_b = max |f'| over [-max(|u|,|u*|), max(|u|,|u*|)].
BoundReport burgers_bound(const ProblemSpec& spec, const Model& model, const TrainingSet& sets,
                          const ScalarTruth& truth, double measured_e_g, const SupNormSampling& sampling = {});

/// Training-error part of the Euler bound:
///   E_G^2 <= (T + C_inf T^2 e^(C_inf T)) (E_tb^2 + E_u^2 + C0 T^(1/2) (E_div + E_sb))
/// C_inf = 1 + 2 d max|du_i/dx_j| and
/// C0 = 2 max(|D|, |dD|)^(1/2) ((|u| + |u*|)^2 / 2 + |p| + |p*|).
BoundReport euler_bound(const ProblemSpec& spec, const Model& model, const TrainingSet& sets,
                        const AnalyticField& truth, double measured_e_g, const SupNormSampling& sampling = {});

/// dv/dx - du/dy at each (t, x, y) column.
Eigen::VectorXd vorticity_field(const JetSource& field, const Eigen::MatrixXd& points);

nlohmann::json to_json(const TrainingErrorReport& r);
nlohmann::json to_json(const GeneralizationReport& r);
nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const BoundReport& r);
/// Non-finite values become the strings "inf", "-inf" or "nan".
nlohmann::json json_number(double v);

}  // namespace pinn
