// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "gtagc/model.hpp"

namespace gtagc::detail {

inline constexpr double kNormEps = 1e-5;

// Standardises x (per column in Batch mode, per row in PerNode mode), then
// applies the learnable scale and shift (both 1 x F).
inline void norm_forward(const Matrix& x, const Matrix& scale, const Matrix& shift, NormMode mode,
                         Matrix& xhat, Vector& inv_std, Matrix& out) {
  if (mode == NormMode::Batch) {
    const RowVector mean = x.colwise().mean();
    xhat = x.rowwise() - mean;
    inv_std = ((xhat.array().square().colwise().mean()) + kNormEps).rsqrt().transpose();
    xhat = xhat * inv_std.asDiagonal();
  } else {
    const Vector mean = x.rowwise().mean();
    xhat = x.colwise() - mean;
    inv_std = ((xhat.array().square().rowwise().mean()) + kNormEps).rsqrt();
    xhat = inv_std.asDiagonal() * xhat;
  }
  out = (xhat * scale.row(0).asDiagonal()).rowwise() + shift.row(0);
}

// Returns d/dx; accumulates scale and shift gradients.
inline Matrix norm_backward(const Matrix& dout, const Matrix& xhat, const Vector& inv_std,
                            const Matrix& scale, NormMode mode, Matrix& dscale, Matrix& dshift) {
  dscale += (dout.cwiseProduct(xhat)).colwise().sum();
  dshift += dout.colwise().sum();
  const Matrix dxhat = dout * scale.row(0).asDiagonal();
  if (mode == NormMode::Batch) {
    const RowVector mean_d = dxhat.colwise().mean();
    const RowVector mean_dx = dxhat.cwiseProduct(xhat).colwise().mean();
    Matrix dx = (dxhat.rowwise() - mean_d) - xhat * mean_dx.asDiagonal();
    return dx * inv_std.asDiagonal();
  }
  const Vector mean_d = dxhat.rowwise().mean();
  const Vector mean_dx = dxhat.cwiseProduct(xhat).rowwise().mean();
  Matrix dx = (dxhat.colwise() - mean_d) - mean_dx.asDiagonal() * xhat;
  return inv_std.asDiagonal() * dx;
}

}  // namespace gtagc::detail
