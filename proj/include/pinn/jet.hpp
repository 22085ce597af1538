#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pinn/network.hpp"

namespace pinn {

/// Output value plus input derivatives of a network at one point.
struct Jet {
  Eigen::VectorXd value;      // m
  Eigen::MatrixXd grad;       // m x dbar, d u_i / d y_j
  Eigen::MatrixXd hess_diag;  // m x dbar, d^2 u_i / d y_j^2
};

/// Which input derivatives a batched evaluation must carry.
struct JetRequest {
  bool first = false;
  /// Input indices that need pure second derivatives. Requires `first`.
  std::vector<int> second;

  static JetRequest value_only() { return {}; }
  static JetRequest first_order() { return {true, {}}; }
  static JetRequest with_second(std::vector<int> dims) { return {true, std::move(dims)}; }

  int channels(int input_dim) const {
    return 1 + (first ? input_dim : 0) + static_cast<int>(second.size());
  }
};

/// Jets at B points. grad[j] / hess[j] are m x B for input j, empty when the
/// derivative was not requested.
struct JetBatch {
  Eigen::MatrixXd value;
  std::vector<Eigen::MatrixXd> grad;
  std::vector<Eigen::MatrixXd> hess;

  int points() const { return static_cast<int>(value.cols()); }
  int outputs() const { return static_cast<int>(value.rows()); }

  /// Zero-filled batch with the same shapes as `like`.
  static JetBatch zeros_like(const JetBatch& like);
};

/// Forward-mode jet propagation over a batch with the intermediates kept for
/// a reverse sweep over the parameters.
///
/// Every layer stores one row-major block per neuron row holding all channels
/// side by side: value | d/dy_j for each input | d^2/dy_s^2 for each requested s.
class JetTape {
 public:
  /// `points` is dbar x B.
  JetTape(const NetworkParams& params, const Eigen::Ref<const Eigen::MatrixXd>& points,
          JetRequest request);

  const JetBatch& outputs() const noexcept { return out_; }
  const JetRequest& request() const noexcept { return request_; }
  int points() const noexcept { return batch_; }

  /// Adds d(loss)/d(theta) to `grad` given d(loss)/d(outputs). Derivative
  /// entries of `adjoint` that were not requested are ignored.
  void backward(const JetBatch& adjoint, std::span<double> grad) const;

 private:
  const NetworkParams* params_;
  JetRequest request_;
  int batch_ = 0;
  int channels_ = 0;
  std::vector<int> second_source_;  // channel of the first derivative feeding each second channel
  std::vector<RowMatrix> inputs_;   // input of affine map k
  std::vector<RowMatrix> pre_;      // pre-activation of affine map k
  JetBatch out_;
};

/// Jet with the full gradient and all pure second derivatives.
Jet forward_jet(const NetworkParams& params, std::span<const double> y);

/// Batched value-only evaluation; returns m x B.
Eigen::MatrixXd forward_batch(const NetworkParams& params,
                              const Eigen::Ref<const Eigen::MatrixXd>& points);

/// A loss contribution defined through jets at a fixed batch of points.
struct JetLossTerm {
  Eigen::MatrixXd points;
  JetRequest request;
  /// Returns the term's value and writes d(term)/d(jets) into `adjoint`,
  /// which arrives zero-filled.
  std::function<double(const JetBatch& jets, JetBatch& adjoint)> reduce;
};

/// Scalar loss built from jet terms plus an optional direct dependence on theta.
struct ScalarLoss {
  std::vector<JetLossTerm> terms;
  std::function<double(std::span<const double> theta, std::span<double> grad)> direct;
};

/// Loss value and its exact gradient with respect to the flat parameter vector
/// (reverse mode through the jet computation). `grad` is overwritten.
double loss_gradient(const NetworkParams& params, const ScalarLoss& loss, std::span<double> grad);

namespace detail {
/// out(i, c) = bias_i + sum_k W(i, k) in(k, c) with a fixed summation order per
/// entry, independent of the column count.
void affine_forward(const double* w, const double* bias, int n_out, int n_in, const double* in,
                    std::ptrdiff_t ld_in, double* out, std::ptrdiff_t ld_out, int cols);
}  // namespace detail

}  // namespace pinn
