// SPDX-License-Identifier: Apache-2.0
// Dense, loop-based encoder used as an oracle for the sparse implementation.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtagc/model.hpp"

namespace gtagc::test {

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const Matrix& m) {
  Dense d(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) d[i][j] = m(i, j);
  return d;
}

inline Matrix from_dense(const Dense& d) {
  Matrix m(static_cast<Index>(d.size()), d.empty() ? 0 : static_cast<Index>(d[0].size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = d[i][j];
  return m;
}

inline Dense matmul(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), k = b.size(), m = b[0].size();
  Dense c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < k; ++t) c[i][j] += a[i][t] * b[t][j];
  return c;
}

inline Dense normalize(const Dense& x, const Dense& scale, const Dense& shift, bool per_node) {
  const std::size_t n = x.size(), f = x[0].size();
  Dense out = x;
  if (!per_node) {
    for (std::size_t j = 0; j < f; ++j) {
      double mean = 0, var = 0;
      for (std::size_t i = 0; i < n; ++i) mean += x[i][j];
      mean /= n;
      for (std::size_t i = 0; i < n; ++i) var += (x[i][j] - mean) * (x[i][j] - mean);
      var /= n;
      for (std::size_t i = 0; i < n; ++i)
        out[i][j] = (x[i][j] - mean) / std::sqrt(var + 1e-5) * scale[0][j] + shift[0][j];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double mean = 0, var = 0;
      for (std::size_t j = 0; j < f; ++j) mean += x[i][j];
      mean /= f;
      for (std::size_t j = 0; j < f; ++j) var += (x[i][j] - mean) * (x[i][j] - mean);
      var /= f;
      for (std::size_t j = 0; j < f; ++j)
        out[i][j] = (x[i][j] - mean) / std::sqrt(var + 1e-5) * scale[0][j] + shift[0][j];
    }
  }
  return out;
}

struct ReferenceLayer {
  Dense logits;     // masked logits, sentinel off-edge
  Dense attention;  // row softmax, zero rows for isolated nodes
  Dense out;
};

inline ReferenceLayer reference_layer(const GTLayerParams& p, const Dense& x, const Dense& adj, double gamma,
                               double slope, bool per_node, bool use_global = true, bool use_self = true) {
  const std::size_t n = x.size();
  const Dense h = matmul(x, to_dense(p.w));
  auto score = [&](const Matrix& a, std::size_t i) {
    double s = 0;
    for (std::size_t f = 0; f < h[i].size(); ++f) s += h[i][f] * a(static_cast<Index>(f), 0);
    return s;
  };
  ReferenceLayer r;
  r.logits.assign(n, std::vector<double>(n, -9e15));
  r.attention.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (adj[i][j] == 0.0) continue;
      any = true;
      const double pre = use_global ? gamma * score(p.a_local, j) + (1 - gamma) * score(p.a_global, i)
                                    : score(p.a_local, j);
      const double m = i == j ? 0.0 : 1.0;
      r.logits[i][j] = adj[i][j] * m * (pre > 0 ? pre : slope * pre);
    }
    if (!any) continue;
    double mx = -1e300, total = 0;
    for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, r.logits[i][j]);
    for (std::size_t j = 0; j < n; ++j) total += std::exp(r.logits[i][j] - mx);
    for (std::size_t j = 0; j < n; ++j) r.attention[i][j] = std::exp(r.logits[i][j] - mx) / total;
  }
  const double w1 = std::log1p(std::exp(p.omega1(0, 0)));
  const double w2 = std::log1p(std::exp(p.omega2(0, 0)));
  std::vector<double> self(n, w2);
  if (use_self) {
    std::vector<double> s(n);
    double mx = -1e300, total = 0;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, s[i] = score(p.a_self, i));
    for (std::size_t i = 0; i < n; ++i) total += std::exp(s[i] - mx);
    for (std::size_t i = 0; i < n; ++i) self[i] = w2 * n * std::exp(s[i] - mx) / total;
  }
  const Dense t = matmul(h, to_dense(p.theta));
  const Dense at = matmul(r.attention, t);
  Dense r0 = h;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < r0[i].size(); ++f) r0[i][f] += w1 * at[i][f] + self[i] * t[i][f];
  const Dense r1 = normalize(r0, to_dense(p.norm1_scale), to_dense(p.norm1_shift), per_node);
  Dense g = matmul(r1, to_dense(p.ffn_w1));
  for (auto& row : g)
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = std::max(0.0, row[k] + p.ffn_b1(0, static_cast<Index>(k)));
  Dense s0 = matmul(g, to_dense(p.ffn_w2));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < s0[i].size(); ++f) s0[i][f] += p.ffn_b2(0, static_cast<Index>(f)) + r1[i][f];
  r.out = normalize(s0, to_dense(p.norm2_scale), to_dense(p.norm2_shift), per_node);
  return r;
}

inline Matrix reference_encoder(const EncoderParams& params, const ModelConfig& cfg, const Matrix& input, const Graph& g) {
  Dense x = to_dense(input);
  const Dense adj = to_dense(Matrix(g.adjacency));
  for (const auto& layer : params.layers)
    x = reference_layer(layer, x, adj, cfg.gamma, cfg.leaky_slope, cfg.norm_mode == NormMode::PerNode,
                        !cfg.disable_global_attention, !cfg.disable_self_attention)
            .out;
  return from_dense(x);
}

}  // namespace gtagc::test
