// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace gtagc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
/// Row-major CSR; row i holds the out-neighbours of node i.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Labels = std::vector<int>;

}  // namespace gtagc
