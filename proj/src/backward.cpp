// SPDX-License-Identifier: Apache-2.0
// Hand-derived adjoints for the encoder, decoder and clustering head. The
// finite-difference tests in tests/test_gradients.cpp are the contract.
#include <cmath>

#include "gtagc/error.hpp"
#include "gtagc/training.hpp"
#include "norm.hpp"

namespace gtagc {

namespace {

constexpr double kLogFloor = 1e-10;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Accumulates parameter gradients into `g`; returns d loss / d input when
// `want_input_grad`, otherwise an empty matrix.
Matrix layer_backward(const GTLayerParams& p, const LayerCache& c, const SparseMatrix& adjacency,
                      const LayerOptions& opts, const Matrix& dout, GTLayerParams& g,
                      bool want_input_grad) {
  const Index n = c.x.rows();

  // out = norm2(r1 + u W2 + b2)
  const Matrix ds0 = detail::norm_backward(dout, c.norm2_xhat, c.norm2_inv_std, p.norm2_scale,
                                           opts.norm_mode, g.norm2_scale, g.norm2_shift);
  g.ffn_w2.noalias() += c.u.transpose() * ds0;
  g.ffn_b2 += ds0.colwise().sum();
  const Matrix dg = (ds0 * p.ffn_w2.transpose()).cwiseProduct((c.g.array() > 0.0).cast<double>().matrix());
  g.ffn_w1.noalias() += c.r1.transpose() * dg;
  g.ffn_b1 += dg.colwise().sum();
  const Matrix dr1 = ds0 + dg * p.ffn_w1.transpose();

  // r1 = norm1(omega1 * attn t + diag(self) t + h)
  const Matrix dr0 = detail::norm_backward(dr1, c.norm1_xhat, c.norm1_inv_std, p.norm1_scale,
                                           opts.norm_mode, g.norm1_scale, g.norm1_shift);
  Matrix dh = dr0;

  const double domega1 = dr0.cwiseProduct(c.agg).sum();
  const Matrix dagg = c.omega1 * dr0;
  Matrix dt = c.attn.transpose() * dagg;
  dt.noalias() += c.self_weight.asDiagonal() * dr0;
  const Vector dself = dr0.cwiseProduct(c.t).rowwise().sum();

  g.theta.noalias() += c.h.transpose() * dt;
  dh.noalias() += dt * p.theta.transpose();

  Vector ds_self = Vector::Zero(n);
  double domega2 = 0.0;
  if (opts.use_self_attention) {
    const double nn = static_cast<double>(n);
    domega2 = nn * dself.dot(c.alpha_self);
    const Vector dalpha = c.omega2 * nn * dself;
    ds_self = (c.alpha_self.array() * (dalpha.array() - dalpha.dot(c.alpha_self))).matrix();
  } else {
    domega2 = dself.sum();
  }
  g.omega1(0, 0) += domega1 * logistic(p.omega1(0, 0));
  g.omega2(0, 0) += domega2 * logistic(p.omega2(0, 0));

  // Edge softmax and LeakyReLU.
  Vector ds_local = Vector::Zero(n);
  Vector ds_global = Vector::Zero(n);
  const int* outer = adjacency.outerIndexPtr();
  const int* inner = adjacency.innerIndexPtr();
  const double* aval = adjacency.valuePtr();
  std::vector<double> dweight;
  for (Index i = 0; i < n; ++i) {
    const Index begin = outer[i], end = outer[i + 1];
    if (begin == end) continue;
    dweight.assign(static_cast<std::size_t>(end - begin), 0.0);
    double weighted = 0.0;
    for (Index k = begin; k < end; ++k) {
      const Index j = inner[k];
      // d loss / d (softmax output) through the dropout multiplier.
      const double da = c.edge_keep[k] * dagg.row(i).dot(c.t.row(j));
      dweight[static_cast<std::size_t>(k - begin)] = da;
      weighted += da * c.edge_attn[k];
    }
    for (Index k = begin; k < end; ++k) {
      const Index j = inner[k];
      const double dlogit = c.edge_attn[k] * (dweight[static_cast<std::size_t>(k - begin)] - weighted);
      const double pre = c.edge_pre[k];
      const double dpre = dlogit * aval[k] * c.edge_mask[k] * (pre > 0.0 ? 1.0 : opts.leaky_slope);
      if (opts.use_global) {
        ds_local[j] += opts.gamma * dpre;
        ds_global[i] += (1.0 - opts.gamma) * dpre;
      } else {
        ds_local[j] += dpre;
      }
    }
  }

  g.a_local.noalias() += c.h.transpose() * ds_local;
  g.a_global.noalias() += c.h.transpose() * ds_global;
  g.a_self.noalias() += c.h.transpose() * ds_self;
  dh.noalias() += ds_local * p.a_local.transpose();
  dh.noalias() += ds_global * p.a_global.transpose();
  dh.noalias() += ds_self * p.a_self.transpose();

  g.w.noalias() += c.x.transpose() * dh;
  if (!want_input_grad) return {};
  return dh * p.w.transpose();
}

// Gradient of the clustering loss with respect to the head logits.
Matrix clustering_logit_grad(const Matrix& y, const Matrix& p, ClusteringLossKind kind) {
  const Index n = y.rows(), k = y.cols();
  Matrix dlogits(n, k);
  if (kind == ClusteringLossKind::KlSelfTrain) {
    const double scale = 1.0 / static_cast<double>(n);
    for (Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Index j = 0; j < k; ++j) {
        const double gl = y(i, j) > kLogFloor ? -p(i, j) * scale : 0.0;
        dlogits(i, j) = gl;
        row += gl;
      }
      for (Index j = 0; j < k; ++j) dlogits(i, j) -= y(i, j) * row;
    }
    return dlogits;
  }
  const double scale = 1.0 / static_cast<double>(n * k);
  Matrix dy(n, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n; ++i) {
      const double yij = y(i, j), pij = p(i, j);
      double d = 0.0;
      if (yij > kLogFloor) d -= pij / yij;
      if (1.0 - yij > kLogFloor) d += (1.0 - pij) / (1.0 - yij);
      dy(i, j) = d * scale;
    }
  for (Index i = 0; i < n; ++i) {
    const double inner_sum = y.row(i).dot(dy.row(i));
    for (Index j = 0; j < k; ++j) dlogits(i, j) = y(i, j) * (dy(i, j) - inner_sum);
  }
  return dlogits;
}

void check_objective(const Objective& obj) {
  if (!obj.input || !obj.adjacency || !obj.mask)
    throw Error(ErrorKind::InvalidArgument, "objective is missing input, adjacency or mask");
}

}  // namespace

LossBreakdown evaluate_loss(const EncoderParams& params, const ModelConfig& cfg, const Objective& obj) {
  check_objective(obj);
  const Matrix z = encoder_forward_input(params, cfg, *obj.input, *obj.adjacency, *obj.mask);
  const double recon = reconstruction_loss_from_embedding(z, *obj.adjacency);
  double clust = 0.0;
  if (obj.target) clust = clustering_loss(clustering_forward(z, params.cluster_w), *obj.target, obj.kind);
  return total_loss(recon, clust, obj.target ? obj.alpha : 0.0);
}

LossBreakdown backward(const EncoderParams& params, const ModelConfig& cfg, const Objective& obj,
                       EncoderParams& grads, std::mt19937_64* rng) {
  check_objective(obj);
  EncoderCache cache;
  const Matrix z = encoder_forward_input(params, cfg, *obj.input, *obj.adjacency, *obj.mask, &cache, rng);
  grads = params.zeros_like();

  Matrix dz;
  const double recon = reconstruction_loss_from_embedding(z, *obj.adjacency, &dz);
  double clust = 0.0;
  if (obj.target) {
    const Matrix y = clustering_forward(z, params.cluster_w);
    clust = clustering_loss(y, *obj.target, obj.kind);
    const Matrix dlogits = obj.alpha * clustering_logit_grad(y, *obj.target, obj.kind);
    grads.cluster_w.noalias() += z.transpose() * dlogits;
    dz.noalias() += dlogits * params.cluster_w.transpose();
  }

  const LayerOptions opts = layer_options(cfg, rng);
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    dz = layer_backward(params.layers[l], cache.layers[l], *obj.adjacency, opts, dz, grads.layers[l], l > 0);
  }

  grads.for_each([](const std::string& name, const Matrix& t) {
    if (!t.allFinite()) throw Error(ErrorKind::NonFinite, "non-finite gradient for " + name);
  });
  return total_loss(recon, clust, obj.target ? obj.alpha : 0.0);
}

}  // namespace gtagc
