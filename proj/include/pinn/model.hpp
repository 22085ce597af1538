#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <Eigen/Core>
#include "json.hpp"

#include "pinn/geometry.hpp"
#include "pinn/jet.hpp"
#include "pinn/network.hpp"

namespace pinn {

/// Affine change of input coordinates z = (y - shift) .* scale applied before
/// the network.
struct InputMap {
  Eigen::VectorXd shift;
  Eigen::VectorXd scale;

  static InputMap identity(int dim);
  /// Maps `box` onto [-1,1]^d.
  static InputMap to_symmetric_cube(const Box& box);
  int dim() const noexcept { return static_cast<int>(shift.size()); }
  bool operator==(const InputMap&) const = default;
};

/// A network together with its input map. Jets are with respect to the
/// original (physical) coordinates.
struct Model {
  NetworkParams params;
  InputMap input;

  Model(NetworkParams p, InputMap m);
  int input_dim() const noexcept { return params.input_dim(); }
  int output_dim() const noexcept { return params.output_dim(); }
  Eigen::MatrixXd evaluate(const Eigen::Ref<const Eigen::MatrixXd>& points) const;
  Jet jet(std::span<const double> y) const;
};

/// JetTape in physical coordinates.
class ModelTape {
 public:
  ModelTape(const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& points,
            const JetRequest& request);
  const JetBatch& outputs() const noexcept { return out_; }
  /// Adds d(loss)/d(theta) given d(loss)/d(physical jets).
  void backward(const JetBatch& adjoint, std::span<double> grad) const;

 private:
  static Eigen::MatrixXd normalize(const InputMap& m, const Eigen::Ref<const Eigen::MatrixXd>& pts);
  const Model* model_;
  JetTape tape_;
  JetBatch out_;
};

/// Current checkpoint format version.
constexpr int kCheckpointVersion = 1;

/// {version, layer_dims, activation, flat_params, input_shift, input_scale, problem}
nlohmann::json checkpoint_to_json(const Model& model, const nlohmann::json& problem);
/// Throws ConfigError on malformed content or an unknown version.
Model checkpoint_from_json(const nlohmann::json& j, nlohmann::json* problem = nullptr);
void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const nlohmann::json& problem);
Model load_checkpoint(const std::filesystem::path& path, nlohmann::json* problem = nullptr);

}  // namespace pinn
