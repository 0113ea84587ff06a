// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "gtagc/error.hpp"
#include "gtagc/spectral.hpp"

namespace gtagc {

namespace {

Vector random_unit(Index n, std::mt19937_64& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  return v.normalized();
}

// Two passes of classical Gram-Schmidt against the first `cols` basis columns.
void reorthogonalize(Vector& w, const Matrix& basis, Index cols) {
  for (int pass = 0; pass < 2; ++pass) {
    const Vector coeffs = basis.leftCols(cols).transpose() * w;
    w.noalias() -= basis.leftCols(cols) * coeffs;
  }
}

}  // namespace

EigenPairs lanczos_smallest(const SparseMatrix& matrix, Index count,
                            const EigenSolverOptions& opts) {
  const Index n = matrix.rows();
  if (count < 1 || count > n)
    throw Error(ErrorKind::InvalidArgument, "requested eigenpair count out of range");
  const Index cap = std::min(n, opts.max_krylov_dim);
  std::mt19937_64 rng(opts.seed);

  Matrix basis(n, cap);
  Vector alpha(cap);
  Vector beta(cap);  // beta[j] couples column j and j+1
  basis.col(0) = random_unit(n, rng);

  Index next_check = std::min(cap, std::max<Index>(2 * count, 20));
  for (Index j = 0; j < cap; ++j) {
    Vector w = matrix * basis.col(j);
    alpha[j] = basis.col(j).dot(w);
    w -= alpha[j] * basis.col(j);
    if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
    reorthogonalize(w, basis, j + 1);
    beta[j] = w.norm();

    const Index m = j + 1;
    if (m >= count && (m == next_check || m == cap)) {
      Eigen::SelfAdjointEigenSolver<Matrix> tri;
      tri.computeFromTridiagonal(alpha.head(m), beta.head(m - 1), Eigen::ComputeEigenvectors);
      // A breakdown step only certifies the current invariant subspace.
      bool converged = beta[j] >= 1e-10;
      for (Index i = 0; i < count; ++i)
        if (std::abs(beta[j] * tri.eigenvectors()(m - 1, i)) > opts.tolerance) converged = false;
      if (converged || m == n) {
        EigenPairs out;
        out.values = tri.eigenvalues().head(count);
        out.vectors = basis.leftCols(m) * tri.eigenvectors().leftCols(count);
        for (Index c = 0; c < count; ++c) out.vectors.col(c).normalize();
        return out;
      }
      next_check = std::min(cap, m + std::max<Index>(count, 20));
    }
    if (j + 1 == cap) break;

    if (beta[j] < 1e-10) {
      // Invariant subspace found; continue from a fresh orthogonal direction.
      Vector fresh = random_unit(n, rng);
      reorthogonalize(fresh, basis, j + 1);
      beta[j] = 0.0;
      basis.col(j + 1) = fresh.normalized();
    } else {
      basis.col(j + 1) = w / beta[j];
    }
  }
  throw Error(ErrorKind::Convergence,
              "Lanczos did not converge within " + std::to_string(cap) + " iterations");
}

}  // namespace gtagc
