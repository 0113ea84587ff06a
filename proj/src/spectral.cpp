// SPDX-License-Identifier: Apache-2.0
#include "gtagc/spectral.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gtagc/error.hpp"

namespace gtagc {

SparseMatrix normalized_laplacian(const Graph& g) {
  const Index n = g.n_nodes;
  // Augmented degree of node i is deg(i) + 1.
  Vector inv_sqrt_deg(n);
  for (Index i = 0; i < n; ++i) inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i)) + 1.0);

  std::vector<Eigen::Triplet<double, int>> trips;
  trips.reserve(static_cast<std::size_t>(g.adjacency.nonZeros() + n));
  for (Index i = 0; i < n; ++i) {
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i),
                       1.0 - inv_sqrt_deg[i] * inv_sqrt_deg[i]);
    for (SparseMatrix::InnerIterator it(g.adjacency, i); it; ++it)
      trips.emplace_back(static_cast<int>(i), it.col(),
                         -it.value() * inv_sqrt_deg[i] * inv_sqrt_deg[it.col()]);
  }
  SparseMatrix lap(n, n);
  lap.setFromTriplets(trips.begin(), trips.end());
  lap.makeCompressed();
  return lap;
}

Matrix laplacian_filter(const Matrix& features, const SparseMatrix& laplacian, int t) {
  if (t < 0) throw Error(ErrorKind::InvalidArgument, "filter order must be non-negative");
  if (laplacian.rows() != features.rows() || laplacian.cols() != features.rows())
    throw Error(ErrorKind::DimensionMismatch,
                "laplacian is " + std::to_string(laplacian.rows()) + "x" +
                    std::to_string(laplacian.cols()) + " but features have " +
                    std::to_string(features.rows()) + " rows");
  if (t == 0) return features;

  SparseMatrix identity(laplacian.rows(), laplacian.cols());
  identity.setIdentity();
  const SparseMatrix smoother = identity - laplacian;

  Matrix out = features;
  for (int step = 0; step < t; ++step) {
    Matrix next = smoother * out;
    if (!next.allFinite())
      throw Error(ErrorKind::NonFinite,
                  "non-finite value after filter step " + std::to_string(step + 1));
    out = std::move(next);
  }
  return out;
}

void canonicalize_signs(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

EigenPairs laplacian_eigenvectors(const SparseMatrix& laplacian, int k_pe,
                                  const EigenSolverOptions& opts) {
  const Index n = laplacian.rows();
  if (k_pe < 1 || k_pe >= n)
    throw Error(ErrorKind::InvalidArgument, "k_pe must lie in [1, " + std::to_string(n) +
                                                "), got " + std::to_string(k_pe));
  EigenPairs all;
  if (n <= opts.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver{Matrix(laplacian)};
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::Convergence, "dense eigensolver failed");
    all.values = solver.eigenvalues();
    all.vectors = solver.eigenvectors();
  } else {
    all = lanczos_smallest(laplacian, k_pe + 1, opts);
  }
  // Skip the lowest pair: the degree-weighted constant direction at 0.
  EigenPairs out;
  out.values = all.values.segment(1, k_pe);
  out.vectors = all.vectors.middleCols(1, k_pe);
  canonicalize_signs(out.vectors);
  return out;
}

Matrix attach_positional_encoding(const Matrix& features, const Matrix& pe) {
  if (pe.cols() == 0) return features;
  if (pe.rows() != features.rows())
    throw Error(ErrorKind::DimensionMismatch,
                "features have " + std::to_string(features.rows()) +
                    " rows but positional encoding has " + std::to_string(pe.rows()));
  Matrix out(features.rows(), features.cols() + pe.cols());
  out << features, pe;
  return out;
}

SpectralBundle build_spectral_bundle(const Graph& g, int filter_order, int k_pe,
                                     const EigenSolverOptions& opts) {
  SpectralBundle b;
  b.filter_order = filter_order;
  b.k_pe = k_pe;
  b.laplacian = normalized_laplacian(g);
  b.smoothed_features = laplacian_filter(g.features, b.laplacian, filter_order);
  if (k_pe > 0) {
    auto pairs = laplacian_eigenvectors(b.laplacian, k_pe, opts);
    b.pos_encoding = std::move(pairs.vectors);
    b.pe_eigenvalues = std::move(pairs.values);
  } else {
    b.pos_encoding.resize(g.n_nodes, 0);
    b.pe_eigenvalues.resize(0);
  }
  return b;
}

}  // namespace gtagc
