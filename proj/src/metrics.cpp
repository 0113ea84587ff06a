// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gtagc/error.hpp"
#include "gtagc/metrics.hpp"

namespace gtagc {

namespace {

void check_lengths(const Labels& truth, const Labels& pred) {
  if (truth.size() != pred.size())
    throw Error(ErrorKind::DimensionMismatch, "label vectors differ in length: " +
                                                  std::to_string(truth.size()) + " vs " +
                                                  std::to_string(pred.size()));
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

// Partitions agree up to relabelling iff every row and column of the
// contingency table has exactly one non-zero cell.
bool same_partition(const ContingencyTable& t) {
  std::vector<int> row_nz(static_cast<std::size_t>(t.n_true()), 0);
  std::vector<int> col_nz(static_cast<std::size_t>(t.n_pred()), 0);
  for (int i = 0; i < t.n_true(); ++i)
    for (int j = 0; j < t.n_pred(); ++j)
      if (t.counts[i][j] > 0) {
        ++row_nz[i];
        ++col_nz[j];
      }
  for (int c : row_nz)
    if (c > 1) return false;
  for (int c : col_nz)
    if (c > 1) return false;
  return true;
}

}  // namespace

ContingencyTable contingency(const Labels& truth, const Labels& pred) {
  check_lengths(truth, pred);
  int kt = 0, kp = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || pred[i] < 0) throw Error(ErrorKind::InvalidArgument, "labels must be non-negative");
    kt = std::max(kt, truth[i] + 1);
    kp = std::max(kp, pred[i] + 1);
  }
  ContingencyTable t;
  t.counts.assign(static_cast<std::size_t>(kt), std::vector<long>(static_cast<std::size_t>(kp), 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++t.counts[truth[i]][pred[i]];
  t.n = static_cast<long>(truth.size());
  return t;
}

AccuracyResult accuracy(const Labels& truth, const Labels& pred) {
  const auto t = contingency(truth, pred);
  AccuracyResult r;
  r.mapping.assign(static_cast<std::size_t>(t.n_pred()), -1);
  if (t.n == 0) return r;
  // Rows are predicted clusters, columns true classes. Matched-pair F1 breaks
  // ties between mappings with equal hits, so the mapping (and the F-score
  // built on it) does not depend on which ids either side carries.
  std::vector<double> class_size(static_cast<std::size_t>(t.n_true()), 0.0);
  std::vector<double> cluster_size(static_cast<std::size_t>(t.n_pred()), 0.0);
  for (int i = 0; i < t.n_true(); ++i)
    for (int j = 0; j < t.n_pred(); ++j) {
      class_size[i] += static_cast<double>(t.counts[i][j]);
      cluster_size[j] += static_cast<double>(t.counts[i][j]);
    }
  const double hit_weight = static_cast<double>(std::min(t.n_true(), t.n_pred()) + 1);
  Matrix cost = Matrix::Zero(t.n_pred(), t.n_true());
  for (int i = 0; i < t.n_true(); ++i)
    for (int j = 0; j < t.n_pred(); ++j) {
      const double c = static_cast<double>(t.counts[i][j]);
      const double f1 = c > 0.0 ? 2.0 * c / (class_size[i] + cluster_size[j]) : 0.0;
      cost(j, i) = -(c * hit_weight + f1);
    }
  const auto assign = hungarian(cost);
  long correct = 0;
  for (int j = 0; j < t.n_pred(); ++j) {
    const int cls = assign[static_cast<std::size_t>(j)];
    if (cls >= 0 && cls < t.n_true()) {
      r.mapping[static_cast<std::size_t>(j)] = cls;
      correct += t.counts[cls][j];
    }
  }
  r.acc = static_cast<double>(correct) / static_cast<double>(t.n);
  return r;
}

double nmi(const Labels& truth, const Labels& pred) {
  const auto t = contingency(truth, pred);
  if (t.n == 0) return 1.0;
  const double n = static_cast<double>(t.n);
  std::vector<double> a(static_cast<std::size_t>(t.n_true()), 0.0), b(static_cast<std::size_t>(t.n_pred()), 0.0);
  for (int i = 0; i < t.n_true(); ++i)
    for (int j = 0; j < t.n_pred(); ++j) {
      a[i] += static_cast<double>(t.counts[i][j]);
      b[j] += static_cast<double>(t.counts[i][j]);
    }
  auto entropy = [n](const std::vector<double>& m) {
    double h = 0.0;
    for (double x : m)
      if (x > 0.0) h -= (x / n) * std::log(x / n);
    return h;
  };
  const double ht = entropy(a), hp = entropy(b);
  if (same_partition(t)) return 1.0;
  if (ht <= 0.0 || hp <= 0.0) return 0.0;
  double mi = 0.0;
  for (int i = 0; i < t.n_true(); ++i)
    for (int j = 0; j < t.n_pred(); ++j) {
      const double c = static_cast<double>(t.counts[i][j]);
      if (c > 0.0) mi += (c / n) * std::log(n * c / (a[i] * b[j]));
    }
  return std::clamp(mi / std::sqrt(ht * hp), 0.0, 1.0);
}

double ari(const Labels& truth, const Labels& pred) {
  const auto t = contingency(truth, pred);
  if (t.n < 2) return 1.0;
  double sum_cells = 0.0, sum_a = 0.0, sum_b = 0.0;
  std::vector<double> b(static_cast<std::size_t>(t.n_pred()), 0.0);
  for (int i = 0; i < t.n_true(); ++i) {
    double a = 0.0;
    for (int j = 0; j < t.n_pred(); ++j) {
      const double c = static_cast<double>(t.counts[i][j]);
      sum_cells += comb2(c);
      a += c;
      b[j] += c;
    }
    sum_a += comb2(a);
  }
  for (double x : b) sum_b += comb2(x);
  const double expected = sum_a * sum_b / comb2(static_cast<double>(t.n));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return same_partition(t) ? 1.0 : 0.0;
  return (sum_cells - expected) / (max_index - expected);
}

double mapped_macro_f(const Labels& truth, const Labels& pred) {
  const auto acc = accuracy(truth, pred);
  int k = 0;
  for (int l : truth) k = std::max(k, l + 1);
  if (k == 0) return 1.0;
  std::vector<double> tp(k, 0.0), n_pred(k, 0.0), n_true(k, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int mapped = acc.mapping[static_cast<std::size_t>(pred[i])];
    n_true[truth[i]] += 1.0;
    if (mapped >= 0) {
      n_pred[mapped] += 1.0;
      if (mapped == truth[i]) tp[mapped] += 1.0;
    }
  }
  double sum = 0.0;
  for (int c = 0; c < k; ++c) {
    if (tp[c] == 0.0) continue;
    const double precision = tp[c] / n_pred[c];
    const double recall = tp[c] / n_true[c];
    sum += 2.0 * precision * recall / (precision + recall);
  }
  return sum / static_cast<double>(k);
}

EvalReport evaluate(const Labels& truth, const Labels& pred) {
  EvalReport r;
  auto acc = accuracy(truth, pred);
  r.acc = acc.acc;
  r.mapping = std::move(acc.mapping);
  r.nmi = nmi(truth, pred);
  r.ari = ari(truth, pred);
  r.fscore = mapped_macro_f(truth, pred);
  return r;
}

std::string eval_csv_header() { return "acc,nmi,fscore,ari"; }

std::string eval_csv_row(const EvalReport& r) {
  std::ostringstream out;
  out.precision(6);
  out << r.acc << ',' << r.nmi << ',' << r.fscore << ',' << r.ari;
  return out.str();
}

}  // namespace gtagc
