#include "pinn/jet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "pinn/errors.hpp"

namespace pinn {

namespace detail {

namespace {

using Packet = double __attribute__((vector_size(64)));
constexpr int kPacket = 8;

inline Packet load_packet(const double* p) {
  Packet v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

// One R x (P*8) output tile. Every entry is bias + sum_k w(i,k) in(k,c),
// accumulated in increasing k, so the result does not depend on how columns
// are tiled.
template <int R, int P>
inline void affine_tile(const double* w, const double* bias, int i0, int n_in, const double* in,
                        std::ptrdiff_t ld_in, double* out, std::ptrdiff_t ld_out, int c0) {
  Packet acc[R][P];
  for (int r = 0; r < R; ++r) {
    const double b = bias ? bias[i0 + r] : 0.0;
    for (int q = 0; q < P; ++q) acc[r][q] = Packet{} + b;
  }
  for (int k = 0; k < n_in; ++k) {
    const double* a = in + k * ld_in + c0;
    Packet av[P];
    for (int q = 0; q < P; ++q) av[q] = load_packet(a + q * kPacket);
    for (int r = 0; r < R; ++r) {
      const double wk = w[static_cast<std::ptrdiff_t>(i0 + r) * n_in + k];
      for (int q = 0; q < P; ++q) acc[r][q] = acc[r][q] + wk * av[q];
    }
  }
  for (int r = 0; r < R; ++r)
    for (int q = 0; q < P; ++q)
      std::memcpy(out + (i0 + r) * ld_out + c0 + q * kPacket, &acc[r][q], sizeof(Packet));
}

void affine_row_tail(const double* w, const double* bias, int i, int n_in, const double* in,
                     std::ptrdiff_t ld_in, double* out, std::ptrdiff_t ld_out, int c0, int nc) {
  const double b = bias ? bias[i] : 0.0;
  double* o = out + i * ld_out + c0;
  for (int c = 0; c < nc; ++c) o[c] = b;
  for (int k = 0; k < n_in; ++k) {
    const double wk = w[static_cast<std::ptrdiff_t>(i) * n_in + k];
    const double* a = in + k * ld_in + c0;
    for (int c = 0; c < nc; ++c) o[c] = o[c] + wk * a[c];
  }
}

}  // namespace

void affine_forward(const double* w, const double* bias, int n_out, int n_in, const double* in,
                    std::ptrdiff_t ld_in, double* out, std::ptrdiff_t ld_out, int cols) {
  constexpr int kRows = 4, kPackets = 2, kCols = kPackets * kPacket;
  const int full_cols = cols - cols % kCols;
  const int full_rows = n_out - n_out % kRows;
  for (int c0 = 0; c0 < full_cols; c0 += kCols) {
    for (int i = 0; i < full_rows; i += kRows)
      affine_tile<kRows, kPackets>(w, bias, i, n_in, in, ld_in, out, ld_out, c0);
    for (int i = full_rows; i < n_out; ++i)
      affine_tile<1, kPackets>(w, bias, i, n_in, in, ld_in, out, ld_out, c0);
  }
  if (full_cols < cols)
    for (int i = 0; i < n_out; ++i)
      affine_row_tail(w, bias, i, n_in, in, ld_in, out, ld_out, full_cols, cols - full_cols);
}

}  // namespace detail

JetBatch JetBatch::zeros_like(const JetBatch& like) {
  JetBatch z;
  z.value = Eigen::MatrixXd::Zero(like.value.rows(), like.value.cols());
  z.grad.resize(like.grad.size());
  z.hess.resize(like.hess.size());
  for (std::size_t j = 0; j < like.grad.size(); ++j)
    z.grad[j] = Eigen::MatrixXd::Zero(like.grad[j].rows(), like.grad[j].cols());
  for (std::size_t j = 0; j < like.hess.size(); ++j)
    z.hess[j] = Eigen::MatrixXd::Zero(like.hess[j].rows(), like.hess[j].cols());
  return z;
}

namespace {

using Array = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ActivationBlock {
  Array value, d1, d2, d3;
};

// Vectorizable tanh: Eigen's double tanh is scalar. Rational form near 0,
// exp(-2|x|) elsewhere; both within a few ulp of std::tanh.
Array tanh_array(const Array& x) {
  const Array z = x.square();
  const Array num = (-9.64399179425052238628e-1 * z - 9.92877231001918586564e1) * z -
                    1.61468768441708447952e3;
  const Array den = ((z + 1.12811678491632931402e2) * z + 2.23548839060100448583e3) * z +
                    4.84406305325125486048e3;
  const Array small = x + x * z * num / den;
  const Array e = (-2.0 * x.abs()).exp();
  const Array large = ((1.0 - e) / (1.0 + e)) * x.sign();
  return (x.abs() < 0.625).select(small, large);
}

ActivationBlock evaluate_activation(Activation act, const Array& s, bool need_d3) {
  ActivationBlock out;
  if (act == Activation::Tanh) {
    out.value = tanh_array(s);
    out.d1 = 1.0 - out.value.square();
    out.d2 = -2.0 * out.value * out.d1;
    if (need_d3) out.d3 = out.d1 * (6.0 * out.value.square() - 2.0);
  } else {
    const Array e = s.min(0.0).exp();
    out.value = (s > 0.0).select(s, e - 1.0);
    out.d1 = (s > 0.0).select(Array::Ones(s.rows(), s.cols()), e);
    out.d2 = (s > 0.0).select(Array::Zero(s.rows(), s.cols()), e);
    if (need_d3) out.d3 = out.d2;
  }
  return out;
}

}  // namespace

JetTape::JetTape(const NetworkParams& params, const Eigen::Ref<const Eigen::MatrixXd>& points,
                 JetRequest request)
    : params_(&params), request_(std::move(request)) {
  const int d = params.input_dim();
  if (points.rows() != d)
    throw ShapeError("points have dimension " + std::to_string(points.rows()) +
                     ", network expects " + std::to_string(d));
  if (!request_.second.empty() && !request_.first)
    throw ShapeError("second derivatives require first derivatives in the request");
  for (int s : request_.second)
    if (s < 0 || s >= d) throw ShapeError("second-derivative index out of range");

  batch_ = static_cast<int>(points.cols());
  channels_ = request_.channels(d);
  const int nfirst = request_.first ? d : 0;
  second_source_.clear();
  for (int s : request_.second) second_source_.push_back(1 + s);

  const int B = batch_;
  const int L = params.num_affine();
  inputs_.resize(L);
  pre_.resize(L);

  RowMatrix a = RowMatrix::Zero(d, static_cast<Eigen::Index>(channels_) * B);
  a.leftCols(B) = points;
  for (int j = 0; j < nfirst; ++j) a.block(j, static_cast<Eigen::Index>(1 + j) * B, 1, B).setOnes();

  for (int k = 0; k < L; ++k) {
    const int n_out = params.layer_dims()[k + 1];
    const int n_in = params.layer_dims()[k];
    RowMatrix z(n_out, a.cols());
    const double* w = params.flat().data() + params.weight_offset(k);
    const double* b = params.flat().data() + params.bias_offset(k);
    detail::affine_forward(w, b, n_out, n_in, a.data(), a.cols(), z.data(), z.cols(), B);
    if (channels_ > 1)
      detail::affine_forward(w, nullptr, n_out, n_in, a.data() + B, a.cols(), z.data() + B,
                             z.cols(), (channels_ - 1) * B);
    inputs_[k] = std::move(a);
    if (k + 1 < L) {
      const Array s = z.leftCols(B).array();
      const ActivationBlock act = evaluate_activation(params.activation(), s, false);
      a.resize(n_out, z.cols());
      a.leftCols(B) = act.value.matrix();
      for (int c = 1; c <= nfirst; ++c)
        a.middleCols(static_cast<Eigen::Index>(c) * B, B) =
            (act.d1 * z.middleCols(static_cast<Eigen::Index>(c) * B, B).array()).matrix();
      for (std::size_t si = 0; si < second_source_.size(); ++si) {
        const Eigen::Index c = static_cast<Eigen::Index>(1 + nfirst + si) * B;
        const Eigen::Index src = static_cast<Eigen::Index>(second_source_[si]) * B;
        a.middleCols(c, B) = (act.d2 * z.middleCols(src, B).array().square() +
                              act.d1 * z.middleCols(c, B).array())
                                 .matrix();
      }
    }
    pre_[k] = std::move(z);
  }

  const RowMatrix& z = pre_.back();
  out_.value = z.leftCols(B);
  if (request_.first) {
    out_.grad.resize(d);
    for (int j = 0; j < d; ++j) out_.grad[j] = z.middleCols(static_cast<Eigen::Index>(1 + j) * B, B);
  }
  out_.hess.resize(d);
  for (std::size_t si = 0; si < request_.second.size(); ++si)
    out_.hess[request_.second[si]] =
        z.middleCols(static_cast<Eigen::Index>(1 + nfirst + si) * B, B);
}

void JetTape::backward(const JetBatch& adjoint, std::span<double> grad) const {
  const NetworkParams& params = *params_;
  if (grad.size() != params.size()) throw ShapeError("gradient buffer has the wrong size");
  const int d = params.input_dim();
  const int B = batch_;
  const int nfirst = request_.first ? d : 0;
  const int L = params.num_affine();
  const int m = params.output_dim();

  if (adjoint.value.rows() != m || adjoint.value.cols() != B)
    throw ShapeError("adjoint value block has the wrong shape");

  RowMatrix abar = RowMatrix::Zero(m, static_cast<Eigen::Index>(channels_) * B);
  abar.leftCols(B) = adjoint.value;
  for (int j = 0; j < nfirst; ++j)
    if (j < static_cast<int>(adjoint.grad.size()) && adjoint.grad[j].size() > 0)
      abar.middleCols(static_cast<Eigen::Index>(1 + j) * B, B) = adjoint.grad[j];
  for (std::size_t si = 0; si < request_.second.size(); ++si) {
    const int s = request_.second[si];
    if (s < static_cast<int>(adjoint.hess.size()) && adjoint.hess[s].size() > 0)
      abar.middleCols(static_cast<Eigen::Index>(1 + nfirst + si) * B, B) = adjoint.hess[s];
  }

  RowMatrix zbar;
  for (int k = L - 1; k >= 0; --k) {
    const RowMatrix& z = pre_[k];
    if (k == L - 1) {
      zbar = std::move(abar);
    } else {
      const Array s = z.leftCols(B).array();
      const ActivationBlock act = evaluate_activation(params.activation(), s, true);
      zbar.resize(z.rows(), z.cols());
      Array zbar0 = act.d1 * abar.leftCols(B).array();
      for (int c = 1; c <= nfirst; ++c) {
        const Eigen::Index off = static_cast<Eigen::Index>(c) * B;
        zbar.middleCols(off, B) = (act.d1 * abar.middleCols(off, B).array()).matrix();
        zbar0 += act.d2 * z.middleCols(off, B).array() * abar.middleCols(off, B).array();
      }
      for (std::size_t si = 0; si < second_source_.size(); ++si) {
        const Eigen::Index c = static_cast<Eigen::Index>(1 + nfirst + si) * B;
        const Eigen::Index src = static_cast<Eigen::Index>(second_source_[si]) * B;
        const auto as = abar.middleCols(c, B).array();
        const auto zs = z.middleCols(src, B).array();
        zbar.middleCols(c, B) = (act.d1 * as).matrix();
        zbar.middleCols(src, B).array() += 2.0 * act.d2 * zs * as;
        zbar0 += (act.d3 * zs.square() + act.d2 * z.middleCols(c, B).array()) * as;
      }
      zbar.leftCols(B) = zbar0.matrix();
    }

    const int n_out = params.layer_dims()[k + 1];
    const int n_in = params.layer_dims()[k];
    MatrixMap wbar(grad.data() + params.weight_offset(k), n_out, n_in);
    wbar.noalias() += zbar * inputs_[k].transpose();
    Eigen::Map<Eigen::VectorXd> bbar(grad.data() + params.bias_offset(k), n_out);
    bbar += zbar.leftCols(B).rowwise().sum();
    if (k > 0) abar.noalias() = params.weight(k).transpose() * zbar;
  }
}

Jet forward_jet(const NetworkParams& params, std::span<const double> y) {
  const int d = params.input_dim();
  if (static_cast<int>(y.size()) != d)
    throw ShapeError("input has " + std::to_string(y.size()) + " entries, network expects " +
                     std::to_string(d));
  std::vector<int> all(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) all[j] = j;
  Eigen::Map<const Eigen::VectorXd> point(y.data(), d);
  const JetTape tape(params, point, JetRequest::with_second(all));
  const JetBatch& out = tape.outputs();
  const int m = params.output_dim();
  Jet jet;
  jet.value = out.value.col(0);
  jet.grad.resize(m, d);
  jet.hess_diag.resize(m, d);
  for (int j = 0; j < d; ++j) {
    jet.grad.col(j) = out.grad[j].col(0);
    jet.hess_diag.col(j) = out.hess[j].col(0);
  }
  return jet;
}

Eigen::MatrixXd forward_batch(const NetworkParams& params,
                              const Eigen::Ref<const Eigen::MatrixXd>& points) {
  const JetTape tape(params, points, JetRequest::value_only());
  return tape.outputs().value;
}

double loss_gradient(const NetworkParams& params, const ScalarLoss& loss, std::span<double> grad) {
  if (grad.size() != params.size()) throw ShapeError("gradient buffer has the wrong size");
  std::fill(grad.begin(), grad.end(), 0.0);
  double total = 0.0;
  for (const JetLossTerm& term : loss.terms) {
    const JetTape tape(params, term.points, term.request);
    JetBatch adjoint = JetBatch::zeros_like(tape.outputs());
    total += term.reduce(tape.outputs(), adjoint);
    tape.backward(adjoint, grad);
  }
  if (loss.direct) {
    std::vector<double> direct_grad(params.size(), 0.0);
    total += loss.direct(params.flat(), direct_grad);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += direct_grad[i];
  }
  return total;
}

}  // namespace pinn
