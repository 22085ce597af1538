#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <vector>

#include "pinn/network.hpp"

namespace oracle {

/// Straight-line composition with plain loops over the flat parameter vector.
inline std::vector<double> compose(const pinn::NetworkParams& p, const std::vector<double>& y) {
  const auto& dims = p.layer_dims();
  const auto flat = p.flat();
  std::vector<double> a = y;
  std::size_t off = 0;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const int n_in = dims[k], n_out = dims[k + 1];
    std::vector<double> z(n_out);
    for (int i = 0; i < n_out; ++i) {
      double s = flat[off + static_cast<std::size_t>(n_in) * n_out + i];
      for (int j = 0; j < n_in; ++j) s += flat[off + static_cast<std::size_t>(i) * n_in + j] * a[j];
      z[i] = s;
    }
    off += static_cast<std::size_t>(n_in + 1) * n_out;
    if (k + 2 < dims.size()) {
      for (double& v : z) {
        if (p.activation() == pinn::Activation::Tanh)
          v = std::tanh(v);
        else
          v = v > 0 ? v : std::expm1(v);
      }
    }
    a = std::move(z);
  }
  return a;
}

inline double rel_err(double approx, double exact, double floor = 1e-3) {
  return std::abs(approx - exact) / std::max(std::abs(exact), floor);
}

}  // namespace oracle
