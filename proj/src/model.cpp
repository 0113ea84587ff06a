// SPDX-License-Identifier: Apache-2.0
#include "gtagc/model.hpp"

#include <cmath>
#include <limits>

#include "gtagc/error.hpp"
#include "norm.hpp"

namespace gtagc {

void ModelConfig::validate() const {
  if (hidden_dims.empty()) throw Error(ErrorKind::Config, "model.hidden_dims must name at least one layer");
  for (int d : hidden_dims)
    if (d < 1) throw Error(ErrorKind::Config, "model.hidden_dims entries must be positive");
  if (gamma < 0.0 || gamma > 1.0) throw Error(ErrorKind::Config, "model.gamma must lie in [0, 1]");
  if (n_clusters < 2) throw Error(ErrorKind::Config, "model.n_clusters must be at least 2");
  if (dropout < 0.0 || dropout >= 1.0) throw Error(ErrorKind::Config, "model.dropout must lie in [0, 1)");
  if (ffn_multiplier < 1) throw Error(ErrorKind::Config, "model.ffn_multiplier must be positive");
  if (filter_order < 0) throw Error(ErrorKind::Config, "model.filter_order must be non-negative");
  if (k_pe < 0) throw Error(ErrorKind::Config, "model.k_pe must be non-negative");
  if (leaky_slope < 0.0) throw Error(ErrorKind::Config, "model.leaky_slope must be non-negative");
}

double softplus(double x) {
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

double inverse_softplus(double y) {
  return y > 30.0 ? y : std::log(std::expm1(y));
}

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Matrix glorot(Index rows, Index cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  // Fill row-major so the draw order does not depend on storage order.
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
  return m;
}

}  // namespace

EncoderParams init_encoder_params(const ModelConfig& cfg, Index input_dim, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  EncoderParams p;
  Index in = input_dim;
  for (int f : cfg.hidden_dims) {
    const Index hidden = static_cast<Index>(f) * cfg.ffn_multiplier;
    GTLayerParams l;
    l.w = glorot(in, f, rng);
    l.a_local = glorot(f, 1, rng);
    l.a_global = glorot(f, 1, rng);
    l.a_self = glorot(f, 1, rng);
    l.omega1 = Matrix::Constant(1, 1, inverse_softplus(0.5));
    l.omega2 = Matrix::Constant(1, 1, inverse_softplus(0.5));
    l.theta = glorot(f, f, rng);
    l.ffn_w1 = glorot(f, hidden, rng);
    l.ffn_b1 = Matrix::Zero(1, hidden);
    l.ffn_w2 = glorot(hidden, f, rng);
    l.ffn_b2 = Matrix::Zero(1, f);
    l.norm1_scale = Matrix::Ones(1, f);
    l.norm1_shift = Matrix::Zero(1, f);
    l.norm2_scale = Matrix::Ones(1, f);
    l.norm2_shift = Matrix::Zero(1, f);
    p.layers.push_back(std::move(l));
    in = f;
  }
  p.cluster_w = glorot(cfg.embedding_dim(), cfg.n_clusters, rng);
  return p;
}

EncoderParams EncoderParams::zeros_like() const {
  EncoderParams z = *this;
  z.for_each([](const std::string&, Matrix& t) { t.setZero(); });
  return z;
}

std::size_t EncoderParams::size() const {
  std::size_t n = 0;
  for_each([&n](const std::string&, const Matrix& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

bool EncoderParams::all_finite() const {
  bool ok = true;
  for_each([&ok](const std::string&, const Matrix& t) { ok = ok && t.allFinite(); });
  return ok;
}

LayerOptions layer_options(const ModelConfig& cfg, std::mt19937_64* rng) {
  LayerOptions o;
  o.gamma = cfg.gamma;
  o.leaky_slope = cfg.leaky_slope;
  o.norm_mode = cfg.norm_mode;
  o.use_global = !cfg.disable_global_attention;
  o.use_self_attention = !cfg.disable_self_attention;
  o.dropout = cfg.dropout;
  o.rng = rng;
  return o;
}

Matrix gt_layer_forward(const GTLayerParams& p, const Matrix& x, const SparseMatrix& adjacency,
                        const SparseMatrix& mask, const LayerOptions& opts, LayerCache* cache) {
  const Index n = x.rows();
  if (x.cols() != p.in_dim())
    throw Error(ErrorKind::DimensionMismatch, "layer expects input width " + std::to_string(p.in_dim()) +
                                                  ", got " + std::to_string(x.cols()));
  if (adjacency.rows() != n || adjacency.cols() != n || mask.rows() != n || mask.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "adjacency/mask must be " + std::to_string(n) + "x" +
                                                  std::to_string(n));

  LayerCache local;
  LayerCache& c = cache ? *cache : local;
  c.x = x;
  c.h = x * p.w;
  c.s_local = c.h * p.a_local;
  c.s_global = c.h * p.a_global;
  c.s_self = c.h * p.a_self;

  const Index nnz = adjacency.nonZeros();
  const int* outer = adjacency.outerIndexPtr();
  const int* inner = adjacency.innerIndexPtr();
  const double* aval = adjacency.valuePtr();
  c.edge_pre.resize(nnz);
  c.edge_mask.resize(nnz);
  c.edge_attn.resize(nnz);
  c.edge_keep.setOnes(nnz);

  for (Index i = 0; i < n; ++i) {
    const Index begin = outer[i], end = outer[i + 1];
    if (begin == end) continue;  // no neighbours: all-sentinel row, zero attention
    double row_max = -std::numeric_limits<double>::infinity();
    for (Index k = begin; k < end; ++k) {
      const Index j = inner[k];
      const double pre = opts.use_global
                             ? opts.gamma * c.s_local[j] + (1.0 - opts.gamma) * c.s_global[i]
                             : c.s_local[j];
      c.edge_pre[k] = pre;
      c.edge_mask[k] = (i == j) ? 0.0 : mask.coeff(i, j);
      const double act = pre > 0.0 ? pre : opts.leaky_slope * pre;
      const double logit = aval[k] * c.edge_mask[k] * act;
      c.edge_attn[k] = logit;
      row_max = std::max(row_max, logit);
    }
    double total = 0.0;
    for (Index k = begin; k < end; ++k) {
      c.edge_attn[k] = std::exp(c.edge_attn[k] - row_max);
      total += c.edge_attn[k];
    }
    for (Index k = begin; k < end; ++k) c.edge_attn[k] /= total;
  }

  if (opts.rng && opts.dropout > 0.0) {
    const double keep = 1.0 - opts.dropout;
    for (Index k = 0; k < nnz; ++k)
      c.edge_keep[k] = uniform01(*opts.rng) < keep ? 1.0 / keep : 0.0;
  }

  c.attn = adjacency;
  for (Index k = 0; k < nnz; ++k) c.attn.valuePtr()[k] = c.edge_attn[k] * c.edge_keep[k];

  c.omega1 = softplus(p.omega1(0, 0));
  c.omega2 = softplus(p.omega2(0, 0));
  if (opts.use_self_attention) {
    const double m = c.s_self.maxCoeff();
    c.alpha_self = (c.s_self.array() - m).exp();
    c.alpha_self /= c.alpha_self.sum();
    c.self_weight = c.omega2 * static_cast<double>(n) * c.alpha_self;
  } else {
    c.alpha_self = Vector::Constant(n, 1.0 / static_cast<double>(n));
    c.self_weight = Vector::Constant(n, c.omega2);
  }

  c.t = c.h * p.theta;
  c.agg = c.attn * c.t;
  Matrix r0 = c.omega1 * c.agg + c.self_weight.asDiagonal() * c.t + c.h;

  detail::norm_forward(r0, p.norm1_scale, p.norm1_shift, opts.norm_mode, c.norm1_xhat,
                       c.norm1_inv_std, c.r1);
  c.g = (c.r1 * p.ffn_w1).rowwise() + p.ffn_b1.row(0);
  c.u = c.g.cwiseMax(0.0);
  Matrix s0 = c.r1 + ((c.u * p.ffn_w2).rowwise() + p.ffn_b2.row(0));
  detail::norm_forward(s0, p.norm2_scale, p.norm2_shift, opts.norm_mode, c.norm2_xhat,
                       c.norm2_inv_std, c.out);
  return c.out;
}

AttentionView attention_view(const GTLayerParams& p, const Matrix& x, const SparseMatrix& adjacency,
                             const SparseMatrix& mask, const LayerOptions& opts) {
  LayerOptions no_dropout = opts;
  no_dropout.rng = nullptr;
  LayerCache c;
  gt_layer_forward(p, x, adjacency, mask, no_dropout, &c);

  AttentionView view;
  view.weights = c.attn;
  const Index n = x.rows();
  view.masked_logits = Matrix::Constant(n, n, kMaskSentinel);
  for (Index i = 0; i < n; ++i)
    for (Index k = adjacency.outerIndexPtr()[i]; k < adjacency.outerIndexPtr()[i + 1]; ++k) {
      const double pre = c.edge_pre[k];
      const double act = pre > 0.0 ? pre : opts.leaky_slope * pre;
      const double a = adjacency.valuePtr()[k];
      if (a > 0.0) view.masked_logits(i, adjacency.innerIndexPtr()[k]) = a * c.edge_mask[k] * act;
    }
  return view;
}

Matrix encoder_input(const ModelConfig& cfg, const SpectralBundle& bundle, const Graph& g) {
  const Matrix& base = cfg.disable_filter ? g.features : bundle.smoothed_features;
  if (base.rows() != g.n_nodes)
    throw Error(ErrorKind::DimensionMismatch, "spectral bundle has " + std::to_string(base.rows()) +
                                                  " rows for a graph of " + std::to_string(g.n_nodes));
  if (cfg.disable_pe || cfg.k_pe == 0) return base;
  return attach_positional_encoding(base, bundle.pos_encoding);
}

Matrix encoder_forward_input(const EncoderParams& params, const ModelConfig& cfg, const Matrix& input,
                             const SparseMatrix& adjacency, const SparseMatrix& mask,
                             EncoderCache* cache, std::mt19937_64* rng) {
  const LayerOptions opts = layer_options(cfg, rng);
  if (cache) cache->layers.resize(params.layers.size());
  Matrix x = input;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    x = gt_layer_forward(params.layers[l], x, adjacency, mask, opts,
                         cache ? &cache->layers[l] : nullptr);
    if (!x.allFinite())
      throw Error(ErrorKind::NonFinite, "non-finite activation in layer " + std::to_string(l));
  }
  return x;
}

Matrix encoder_forward(const EncoderParams& params, const ModelConfig& cfg, const SpectralBundle& bundle,
                       const Graph& g, EncoderCache* cache, std::mt19937_64* rng) {
  const Matrix input = encoder_input(cfg, bundle, g);
  return encoder_forward_input(params, cfg, input, g.adjacency, mask_of(g), cache, rng);
}

Matrix row_softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    out.row(i) = (logits.row(i).array() - m).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

Matrix decode_adjacency(const Matrix& z) {
  const Matrix logits = z * z.transpose();
  return logits.unaryExpr([](double q) { return 1.0 / (1.0 + std::exp(-q)); });
}

Matrix clustering_forward(const Matrix& z, const Matrix& cluster_w) {
  if (z.cols() != cluster_w.rows())
    throw Error(ErrorKind::DimensionMismatch, "embedding width " + std::to_string(z.cols()) +
                                                  " does not match cluster head " +
                                                  std::to_string(cluster_w.rows()));
  return row_softmax(z * cluster_w);
}

Labels hard_assignments(const Matrix& y) {
  Labels out(static_cast<std::size_t>(y.rows()));
  for (Index i = 0; i < y.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < y.cols(); ++j)
      if (y(i, j) > y(i, best)) best = j;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace gtagc
