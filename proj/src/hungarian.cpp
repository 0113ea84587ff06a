// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include "gtagc/error.hpp"
#include "gtagc/metrics.hpp"

namespace gtagc {

// Shortest augmenting path with row/column potentials, O(n^3).
std::vector<int> hungarian(const Matrix& cost) {
  if (!cost.allFinite()) throw Error(ErrorKind::InvalidArgument, "assignment cost has non-finite entries");
  const Index n = std::max(cost.rows(), cost.cols());
  if (n == 0) return {};
  Matrix c = Matrix::Zero(n, n);
  c.topLeftCorner(cost.rows(), cost.cols()) = cost;

  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> match_col(n + 1, 0), way(n + 1, 0);
  for (Index row = 1; row <= n; ++row) {
    match_col[0] = row;
    Index col0 = 0;
    std::vector<double> min_v(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const Index row0 = match_col[col0];
      double delta = inf;
      Index col1 = 0;
      for (Index col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double reduced = c(row0 - 1, col - 1) - u[row0] - v[col];
        if (reduced < min_v[col]) {
          min_v[col] = reduced;
          way[col] = col0;
        }
        if (min_v[col] < delta) {
          delta = min_v[col];
          col1 = col;
        }
      }
      for (Index col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match_col[col]] += delta;
          v[col] -= delta;
        } else {
          min_v[col] -= delta;
        }
      }
      col0 = col1;
    } while (match_col[col0] != 0);
    do {
      const Index col1 = way[col0];
      match_col[col0] = match_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (Index col = 1; col <= n; ++col)
    assignment[static_cast<std::size_t>(match_col[col] - 1)] = static_cast<int>(col - 1);
  return assignment;
}

}  // namespace gtagc
