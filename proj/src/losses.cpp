// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "gtagc/error.hpp"
#include "gtagc/training.hpp"

namespace gtagc {

namespace {

constexpr double kLogFloor = 1e-10;
constexpr Index kReconBlockRows = 256;

double softplus_stable(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// #zeros / #ones of the self-loop augmented target.
double positive_weight(const SparseMatrix& adjacency) {
  const double n = static_cast<double>(adjacency.rows());
  const double ones = static_cast<double>(adjacency.nonZeros()) + n;
  return (n * n - ones) / ones;
}

// Dense rows [begin, begin + rows) of A + I.
Matrix target_block(const SparseMatrix& adjacency, Index begin, Index rows) {
  Matrix t = Matrix::Zero(rows, adjacency.cols());
  for (Index r = 0; r < rows; ++r) {
    const Index i = begin + r;
    t(r, i) = 1.0;
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it) t(r, it.col()) = 1.0;
  }
  return t;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw Error(ErrorKind::Config, "train.lr must be positive");
  if (max_epochs < 0) throw Error(ErrorKind::Config, "train.max_epochs must be non-negative");
  if (patience < 1) throw Error(ErrorKind::Config, "train.patience must be positive");
  if (patience > max_epochs && max_epochs > 0)
    throw Error(ErrorKind::Config, "train.patience must not exceed train.max_epochs");
  if (alpha < 0.0) throw Error(ErrorKind::Config, "train.alpha must be non-negative");
  if (pretrain_epochs < 0) throw Error(ErrorKind::Config, "train.pretrain_epochs must be non-negative");
  if (target_update_interval < 1)
    throw Error(ErrorKind::Config, "train.target_update_interval must be positive");
  if (kmeans_restarts < 1) throw Error(ErrorKind::Config, "train.kmeans_restarts must be positive");
  if (eval_interval < 0) throw Error(ErrorKind::Config, "train.eval_interval must be non-negative");
}

double reconstruction_loss(const Matrix& a_pred, const SparseMatrix& adjacency) {
  const Index n = adjacency.rows();
  if (a_pred.rows() != n || a_pred.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "prediction must be " + std::to_string(n) + "x" +
                                                  std::to_string(n));
  if (!((a_pred.array() > 0.0).all() && (a_pred.array() < 1.0).all()))
    throw Error(ErrorKind::InvalidArgument, "reconstruction entries must lie strictly inside (0, 1)");
  const double w = positive_weight(adjacency);
  const Matrix target = target_block(adjacency, 0, n);
  double sum = 0.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const double p = a_pred(i, j);
      sum += target(i, j) > 0.0 ? -w * std::log(p) : -std::log1p(-p);
    }
  return sum / static_cast<double>(n * n);
}

double reconstruction_loss_from_embedding(const Matrix& z, const SparseMatrix& adjacency, Matrix* dz) {
  const Index n = z.rows();
  if (adjacency.rows() != n)
    throw Error(ErrorKind::DimensionMismatch, "embedding rows differ from adjacency size");
  const double w = positive_weight(adjacency);
  const double scale = 1.0 / static_cast<double>(n * n);
  if (dz) dz->setZero(n, z.cols());

  double sum = 0.0;
  for (Index begin = 0; begin < n; begin += kReconBlockRows) {
    const Index rows = std::min(kReconBlockRows, n - begin);
    const Matrix logits = z.middleRows(begin, rows) * z.transpose();
    const Matrix target = target_block(adjacency, begin, rows);
    Matrix dlogits(rows, n);
    for (Index j = 0; j < n; ++j)
      for (Index r = 0; r < rows; ++r) {
        const double q = logits(r, j);
        if (target(r, j) > 0.0) {
          sum += w * softplus_stable(-q);
          dlogits(r, j) = -w * sigmoid(-q) * scale;
        } else {
          sum += softplus_stable(q);
          dlogits(r, j) = sigmoid(q) * scale;
        }
      }
    // d/dz of sum_ij f(z_i . z_j) with a symmetric gradient matrix.
    if (dz) dz->middleRows(begin, rows).noalias() += 2.0 * dlogits * z;
  }
  return sum * scale;
}

Matrix target_distribution(const Matrix& y) {
  const RowVector mass = y.colwise().sum();
  for (Index j = 0; j < mass.size(); ++j)
    if (!(mass[j] > 0.0))
      throw Error(ErrorKind::CollapsedCluster, "cluster " + std::to_string(j) + " has zero total mass");
  Matrix p = y.array().square().rowwise() / mass.array();
  const Vector row_sum = p.rowwise().sum();
  return row_sum.cwiseInverse().asDiagonal() * p;
}

double clustering_loss(const Matrix& y, const Matrix& p, ClusteringLossKind kind) {
  if (y.rows() != p.rows() || y.cols() != p.cols())
    throw Error(ErrorKind::DimensionMismatch, "assignment and target shapes differ");
  double sum = 0.0;
  if (kind == ClusteringLossKind::KlSelfTrain) {
    for (Index j = 0; j < y.cols(); ++j)
      for (Index i = 0; i < y.rows(); ++i) {
        const double pij = p(i, j);
        if (pij > 0.0)
          sum += pij * (std::log(std::max(pij, kLogFloor)) - std::log(std::max(y(i, j), kLogFloor)));
      }
    return sum / static_cast<double>(y.rows());
  }
  for (Index j = 0; j < y.cols(); ++j)
    for (Index i = 0; i < y.rows(); ++i) {
      const double pij = p(i, j), yij = y(i, j);
      sum -= pij * std::log(std::max(yij, kLogFloor)) +
             (1.0 - pij) * std::log(std::max(1.0 - yij, kLogFloor));
    }
  return sum / static_cast<double>(y.size());
}

LossBreakdown total_loss(double recon, double clust, double alpha) {
  if (alpha < 0.0) throw Error(ErrorKind::InvalidArgument, "alpha must be non-negative");
  return {recon, clust, recon + alpha * clust};
}

}  // namespace gtagc
