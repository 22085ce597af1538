#include "pinn/network.hpp"

#include <cmath>

#include "pinn/errors.hpp"
#include "pinn/jet.hpp"
#include "pinn/rng.hpp"

namespace pinn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Tanh:
      return "tanh";
    case Activation::Celu:
      return "celu";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "celu") return Activation::Celu;
  throw ArchitectureError("unknown activation '" + std::string(name) + "'");
}

ActivationDerivatives activation_derivatives(Activation a, double x) {
  if (a == Activation::Tanh) {
    const double t = std::tanh(x);
    const double d1 = 1.0 - t * t;
    return {t, d1, -2.0 * t * d1, d1 * (6.0 * t * t - 2.0)};
  }
  if (x > 0.0) return {x, 1.0, 0.0, 0.0};
  const double e = std::exp(x);
  return {std::expm1(x), e, e, e};
}

std::size_t parameter_count(std::span<const int> dims) {
  std::size_t m = 0;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k)
    m += static_cast<std::size_t>(dims[k] + 1) * static_cast<std::size_t>(dims[k + 1]);
  return m;
}

namespace {

void validate_dims(const std::vector<int>& dims) {
  if (dims.empty()) throw ArchitectureError("layer_dims is empty");
  if (dims.size() < 3)
    throw ArchitectureError("network needs an input, at least one hidden layer and an output");
  for (int d : dims)
    if (d < 1) throw ArchitectureError("layer sizes must be positive");
}

}  // namespace

NetworkParams::NetworkParams(std::vector<int> layer_dims, Activation activation)
    : dims_(std::move(layer_dims)), activation_(activation) {
  validate_dims(dims_);
  offsets_.reserve(dims_.size() - 1);
  std::size_t off = 0;
  for (std::size_t k = 0; k + 1 < dims_.size(); ++k) {
    offsets_.push_back(off);
    off += static_cast<std::size_t>(dims_[k] + 1) * static_cast<std::size_t>(dims_[k + 1]);
  }
  flat_.assign(off, 0.0);
}

NetworkParams::NetworkParams(std::vector<int> layer_dims, Activation activation,
                             std::span<const double> flat)
    : NetworkParams(std::move(layer_dims), activation) {
  if (flat.size() != flat_.size())
    throw ShapeError("flat parameter vector has " + std::to_string(flat.size()) +
                     " entries, architecture needs " + std::to_string(flat_.size()));
  std::copy(flat.begin(), flat.end(), flat_.begin());
}

ConstMatrixMap NetworkParams::weight(int k) const {
  return ConstMatrixMap(flat_.data() + offsets_[k], dims_[k + 1], dims_[k]);
}

MatrixMap NetworkParams::weight(int k) {
  return MatrixMap(flat_.data() + offsets_[k], dims_[k + 1], dims_[k]);
}

std::span<const double> NetworkParams::bias(int k) const {
  return {flat_.data() + bias_offset(k), static_cast<std::size_t>(dims_[k + 1])};
}

std::span<double> NetworkParams::bias(int k) {
  return {flat_.data() + bias_offset(k), static_cast<std::size_t>(dims_[k + 1])};
}

std::vector<bool> NetworkParams::weight_mask() const {
  std::vector<bool> mask(flat_.size(), false);
  for (int k = 0; k < num_affine(); ++k) {
    const std::size_t n = static_cast<std::size_t>(dims_[k]) * dims_[k + 1];
    std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(offsets_[k]), n, true);
  }
  return mask;
}

NetworkParams init_params(std::uint64_t seed, std::vector<int> layer_dims, Activation activation,
                          InitScheme scheme) {
  NetworkParams params(std::move(layer_dims), activation);
  Rng rng(seed, 0x1417);
  switch (scheme) {
    case InitScheme::XavierUniform:
      for (int k = 0; k < params.num_affine(); ++k) {
        const auto& d = params.layer_dims();
        const double bound = std::sqrt(6.0 / static_cast<double>(d[k] + d[k + 1]));
        auto w = params.weight(k);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
          for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-bound, bound);
      }
      break;
  }
  return params;
}

std::vector<int> make_layer_dims(int in, int depth, int width, int out) {
  if (depth < 1) throw ArchitectureError("at least one hidden layer is required");
  std::vector<int> dims{in};
  dims.insert(dims.end(), static_cast<std::size_t>(depth), width);
  dims.push_back(out);
  return dims;
}

Eigen::VectorXd forward(const NetworkParams& params, std::span<const double> y) {
  if (static_cast<int>(y.size()) != params.input_dim())
    throw ShapeError("input has " + std::to_string(y.size()) + " entries, network expects " +
                     std::to_string(params.input_dim()));
  Eigen::Map<const Eigen::VectorXd> point(y.data(), static_cast<Eigen::Index>(y.size()));
  return forward_batch(params, point).col(0);
}

}  // namespace pinn
