// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtagc/types.hpp"

namespace gtagc {

struct ContingencyTable {
  std::vector<std::vector<long>> counts;  // [true class][predicted cluster]
  long n = 0;

  int n_true() const { return static_cast<int>(counts.size()); }
  int n_pred() const { return counts.empty() ? 0 : static_cast<int>(counts.front().size()); }
};

/// Label values must be non-negative; the table spans [0, max + 1).
ContingencyTable contingency(const Labels& truth, const Labels& pred);

/// Minimum-cost assignment for a square cost matrix. Entry r of the result
/// is the column assigned to row r. Rectangular inputs are zero-padded to
/// square and the result covers the padded size.
std::vector<int> hungarian(const Matrix& cost);

struct EvalReport {
  double acc = 0.0;
  double nmi = 0.0;
  double fscore = 0.0;
  double ari = 0.0;
  std::vector<int> mapping;  // predicted cluster -> true class, -1 if unmatched
};

struct AccuracyResult {
  double acc = 0.0;
  std::vector<int> mapping;
};

AccuracyResult accuracy(const Labels& truth, const Labels& pred);
double nmi(const Labels& truth, const Labels& pred);
double ari(const Labels& truth, const Labels& pred);
double mapped_macro_f(const Labels& truth, const Labels& pred);

EvalReport evaluate(const Labels& truth, const Labels& pred);

/// Header and row for the one-line CSV form of a report.
std::string eval_csv_header();
std::string eval_csv_row(const EvalReport& r);

struct KMeansResult {
  Labels labels;
  Matrix centroids;  // k x d
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_trace;  // after each assignment step
};

/// Lloyd iterations from k-means++ seeding.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter = 300);

/// Best-inertia result over `restarts` seeds derived from `seed`.
KMeansResult kmeans_best_of(const Matrix& points, int k, std::uint64_t seed, int restarts,
                            int max_iter = 300);

}  // namespace gtagc
