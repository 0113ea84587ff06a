// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "gtagc/graph.hpp"
#include "gtagc/types.hpp"

namespace gtagc {

/// Precomputed per-graph inputs to the encoder.
struct SpectralBundle {
  SparseMatrix laplacian;   // I - D^-1/2 (A + I) D^-1/2
  Matrix smoothed_features; // (I - L)^t X
  Matrix pos_encoding;      // N x k_pe, sign-canonical columns
  Vector pe_eigenvalues;    // eigenvalue of each pos_encoding column
  int filter_order = 0;
  int k_pe = 0;
};

/// Symmetric normalised Laplacian of the self-loop augmented adjacency.
SparseMatrix normalized_laplacian(const Graph& g);

/// Applies (I - L)^t to `features` as t sparse-dense products.
Matrix laplacian_filter(const Matrix& features, const SparseMatrix& laplacian, int t);

struct EigenSolverOptions {
  Index dense_threshold = 5000;  // N at or below this uses the dense solver
  Index max_krylov_dim = 4000;   // Lanczos iteration cap
  double tolerance = 1e-9;       // Ritz residual ||Lv - lv|| bound
  std::uint64_t seed = 1;        // Lanczos start vector
};

struct EigenPairs {
  Vector values;
  Matrix vectors;
};

/// Eigenvectors for the k_pe smallest eigenvalues after the first, with
/// columns sign-canonicalised. Requires 1 <= k_pe < N.
EigenPairs laplacian_eigenvectors(const SparseMatrix& laplacian, int k_pe,
                                  const EigenSolverOptions& opts = {});

/// The `count` smallest eigenpairs of a symmetric sparse matrix by Lanczos
/// with full reorthogonalisation. Throws ErrorKind::Convergence when the
/// Krylov dimension cap is reached before all residuals pass.
EigenPairs lanczos_smallest(const SparseMatrix& matrix, Index count,
                            const EigenSolverOptions& opts);

/// Flips each column so that its entry of largest magnitude is non-negative.
void canonicalize_signs(Matrix& vectors);

/// Column-wise concatenation [features | pe]; pe may have zero columns.
Matrix attach_positional_encoding(const Matrix& features, const Matrix& pe);

/// Laplacian, filtered features and (when k_pe > 0) positional encodings.
SpectralBundle build_spectral_bundle(const Graph& g, int filter_order, int k_pe,
                                     const EigenSolverOptions& opts = {});

/// Versioned binary cache, keyed by graph fingerprint, t and k_pe.
void save_spectral_bundle(const std::filesystem::path& path, const SpectralBundle& bundle,
                          std::uint64_t graph_fingerprint);

/// Returns nullopt if the file is absent or was built for different inputs;
/// throws ErrorKind::Format on a corrupt file.
std::optional<SpectralBundle> load_spectral_bundle(const std::filesystem::path& path,
                                                   std::uint64_t graph_fingerprint,
                                                   int filter_order, int k_pe);

}  // namespace gtagc
