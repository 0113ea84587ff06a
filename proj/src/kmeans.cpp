// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <random>

#include "gtagc/error.hpp"
#include "gtagc/metrics.hpp"

namespace gtagc {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Matrix plus_plus_seeds(const Matrix& x, int k, std::mt19937_64& rng) {
  const Index n = x.rows();
  Matrix centers(k, x.cols());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  Index first = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
  centers.row(0) = x.row(first);
  chosen[first] = 1;
  Vector d2 = (x.rowwise() - x.row(first)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = -1;
    if (total > 0.0) {
      double r = uniform01(rng) * total;
      for (Index i = 0; i < n; ++i) {
        r -= d2[i];
        if (r < 0.0 && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0)  // rounding left r >= 0; take the last positive weight
        for (Index i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
    } else {
      // Every point coincides with a centre; take any unused row.
      Index skip = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
      for (Index s = 0; s < n && pick < 0; ++s) {
        const Index i = (skip + s) % n;
        if (!chosen[i]) pick = i;
      }
      if (pick < 0) pick = skip;
    }
    chosen[pick] = 1;
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - x.row(pick)).rowwise().squaredNorm());
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter) {
  const Index n = points.rows();
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (k > n)
    throw Error(ErrorKind::InvalidArgument, "k = " + std::to_string(k) + " exceeds " + std::to_string(n) +
                                                " points");
  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centroids = plus_plus_seeds(points, k, rng);
  r.labels.assign(static_cast<std::size_t>(n), -1);
  Vector dist(n);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - r.centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist[i] = best_d;
      inertia += best_d;
      if (r.labels[i] != best) {
        r.labels[i] = best;
        changed = true;
      }
    }
    r.inertia = inertia;
    r.inertia_trace.push_back(inertia);
    r.iterations = iter + 1;
    if (!changed && iter > 0) break;

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(r.labels[i]) += points.row(i);
      ++counts[r.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        r.centroids.row(c) = sums.row(c) / static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: move it onto the point farthest from its centre.
      Index far = 0;
      dist.maxCoeff(&far);
      if (dist[far] > 0.0) {
        r.centroids.row(c) = points.row(far);
        dist[far] = 0.0;
      }
    }
  }
  return r;
}

KMeansResult kmeans_best_of(const Matrix& points, int k, std::uint64_t seed, int restarts, int max_iter) {
  KMeansResult best;
  for (int r = 0; r < restarts; ++r) {
    auto run = kmeans(points, k, seed + static_cast<std::uint64_t>(r), max_iter);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

}  // namespace gtagc
