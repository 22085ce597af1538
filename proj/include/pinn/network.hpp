#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace pinn {

enum class Activation { Tanh, Celu };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Activation value and its first three derivatives at a scalar.
struct ActivationDerivatives {
  double value, d1, d2, d3;
};

/// CELU(x) = max(0,x) + min(0, exp(x)-1). At x = 0 the second and third
/// derivatives come from the exponential branch.
ActivationDerivatives activation_derivatives(Activation a, double x);

enum class InitScheme { XavierUniform };

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;

/// Dense feedforward network: affine maps C_k alternating with a scalar
/// activation, last layer affine only.
///
/// All tunable values live in one flat vector laid out W_1, b_1, W_2, b_2, ...
/// where each W_k (d_{k+1} x d_k) is stored row-major.
class NetworkParams {
 public:
  NetworkParams(std::vector<int> layer_dims, Activation activation);
  NetworkParams(std::vector<int> layer_dims, Activation activation, std::span<const double> flat);

  const std::vector<int>& layer_dims() const noexcept { return dims_; }
  Activation activation() const noexcept { return activation_; }
  int input_dim() const noexcept { return dims_.front(); }
  int output_dim() const noexcept { return dims_.back(); }
  /// Number of affine maps (K-1 hidden plus the output map).
  int num_affine() const noexcept { return static_cast<int>(dims_.size()) - 1; }

  std::size_t size() const noexcept { return flat_.size(); }
  std::span<const double> flat() const noexcept { return flat_; }
  std::span<double> flat() noexcept { return flat_; }

  ConstMatrixMap weight(int k) const;
  MatrixMap weight(int k);
  std::span<const double> bias(int k) const;
  std::span<double> bias(int k);

  std::size_t weight_offset(int k) const { return offsets_[k]; }
  std::size_t bias_offset(int k) const {
    return offsets_[k] + static_cast<std::size_t>(dims_[k]) * dims_[k + 1];
  }
  /// True at flat indices that belong to a weight matrix (not a bias).
  std::vector<bool> weight_mask() const;

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;

 private:
  std::vector<int> dims_;
  Activation activation_;
  std::vector<std::size_t> offsets_;
  std::vector<double> flat_;
};

/// M = sum_k (d_k + 1) d_{k+1}.
std::size_t parameter_count(std::span<const int> layer_dims);

/// Xavier-uniform weights with bound sqrt(6/(d_k+d_{k+1})), zero biases.
NetworkParams init_params(std::uint64_t seed, std::vector<int> layer_dims, Activation activation,
                          InitScheme scheme = InitScheme::XavierUniform);

/// Layer dims for an input of size `in`, `depth` hidden layers of `width`, output `out`.
std::vector<int> make_layer_dims(int in, int depth, int width, int out);

Eigen::VectorXd forward(const NetworkParams& params, std::span<const double> y);

}  // namespace pinn
