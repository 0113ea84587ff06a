// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gtagc/graph.hpp"
#include "gtagc/spectral.hpp"
#include "gtagc/types.hpp"

namespace gtagc {

/// Logit assigned to non-edges before the row softmax.
inline constexpr double kMaskSentinel = -9e15;

enum class NormMode {
  Batch,    // per feature, statistics over nodes
  PerNode,  // per node, statistics over features
};

struct ModelConfig {
  std::vector<int> hidden_dims{256, 16};  // last entry is the embedding width
  double gamma = 0.75;
  double leaky_slope = 0.2;
  int n_clusters = 2;
  double dropout = 0.0;
  int ffn_multiplier = 2;
  NormMode norm_mode = NormMode::Batch;
  int filter_order = 2;
  int k_pe = 16;
  bool disable_filter = false;
  bool disable_pe = false;
  bool disable_global_attention = false;
  bool disable_self_attention = false;

  int n_layers() const { return static_cast<int>(hidden_dims.size()); }
  int embedding_dim() const { return hidden_dims.back(); }
  /// Throws ErrorKind::Config when an invariant fails.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

/// One Graph Transformer layer. Every tensor is stored as a Matrix so that
/// optimisers and serialisers can treat parameters uniformly; vectors are
/// columns (attention vectors) or rows (biases, norm scale/shift).
struct GTLayerParams {
  Matrix w;             // D_in x F
  Matrix a_local;       // F x 1
  Matrix a_global;      // F x 1
  Matrix a_self;        // F x 1
  Matrix omega1;        // 1 x 1, unconstrained; applied through softplus
  Matrix omega2;        // 1 x 1, unconstrained; applied through softplus
  Matrix theta;         // F x F
  Matrix ffn_w1;        // F x H
  Matrix ffn_b1;        // 1 x H
  Matrix ffn_w2;        // H x F
  Matrix ffn_b2;        // 1 x F
  Matrix norm1_scale;   // 1 x F
  Matrix norm1_shift;
  Matrix norm2_scale;
  Matrix norm2_shift;

  Index in_dim() const { return w.rows(); }
  Index out_dim() const { return w.cols(); }

  template <typename Self, typename Fn>
  static void visit(Self& p, Fn&& fn) {
    fn("w", p.w);
    fn("a_local", p.a_local);
    fn("a_global", p.a_global);
    fn("a_self", p.a_self);
    fn("omega1", p.omega1);
    fn("omega2", p.omega2);
    fn("theta", p.theta);
    fn("ffn_w1", p.ffn_w1);
    fn("ffn_b1", p.ffn_b1);
    fn("ffn_w2", p.ffn_w2);
    fn("ffn_b2", p.ffn_b2);
    fn("norm1_scale", p.norm1_scale);
    fn("norm1_shift", p.norm1_shift);
    fn("norm2_scale", p.norm2_scale);
    fn("norm2_shift", p.norm2_shift);
  }
};

struct EncoderParams {
  std::vector<GTLayerParams> layers;
  Matrix cluster_w;  // embedding_dim x k

  /// Calls fn(name, tensor) for every tensor, e.g. "layer1.theta", "cluster_w".
  template <typename Fn>
  void for_each(Fn&& fn) {
    visit_all(*this, fn);
  }
  template <typename Fn>
  void for_each(Fn&& fn) const {
    visit_all(*this, fn);
  }

  /// Same structure with every tensor zero-filled.
  EncoderParams zeros_like() const;
  std::size_t size() const;  // scalar parameter count
  bool all_finite() const;

 private:
  template <typename Self, typename Fn>
  static void visit_all(Self& self, Fn& fn) {
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      const std::string prefix = "layer" + std::to_string(l) + ".";
      GTLayerParams::visit(self.layers[l], [&](const char* name, auto& t) { fn(prefix + name, t); });
    }
    fn(std::string("cluster_w"), self.cluster_w);
  }
};

/// Glorot-uniform matrices, zero biases, unit norm scales, omega = 0.5.
EncoderParams init_encoder_params(const ModelConfig& cfg, Index input_dim, std::uint64_t seed);

/// Non-negative map applied to the stored omega values.
double softplus(double x);
double inverse_softplus(double y);

/// Per-call switches for a layer forward pass.
struct LayerOptions {
  double gamma = 0.75;
  double leaky_slope = 0.2;
  NormMode norm_mode = NormMode::Batch;
  bool use_global = true;
  bool use_self_attention = true;
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;  // dropout is applied only when set
};

LayerOptions layer_options(const ModelConfig& cfg, std::mt19937_64* rng = nullptr);

/// Saved activations of one layer, consumed by the backward pass.
struct LayerCache {
  Matrix x;             // layer input
  Matrix h;             // x W
  Vector s_local, s_global, s_self;
  Vector edge_pre;      // per stored adjacency entry, LeakyReLU input
  Vector edge_mask;     // mask value per stored entry
  Vector edge_attn;     // softmax output
  Vector edge_keep;     // dropout multiplier (1 when disabled)
  SparseMatrix attn;    // edge_attn * edge_keep on the adjacency pattern
  Vector alpha_self;    // softmax of s_self over nodes
  Vector self_weight;   // identity-term weight per node
  double omega1 = 0.0, omega2 = 0.0;
  Matrix t;             // h theta
  Matrix agg;           // attn t
  Matrix norm1_xhat;
  Vector norm1_inv_std;
  Matrix r1;
  Matrix g;             // r1 W1 + b1
  Matrix u;             // relu(g)
  Matrix norm2_xhat;
  Vector norm2_inv_std;
  Matrix out;
};

/// Layer forward on an edge set. `adjacency` carries the edges attended
/// over; `mask` is multiplied into the logits and must have a zero diagonal.
Matrix gt_layer_forward(const GTLayerParams& p, const Matrix& x, const SparseMatrix& adjacency,
                        const SparseMatrix& mask, const LayerOptions& opts,
                        LayerCache* cache = nullptr);

/// Edge attention for inspection: returns the row-softmaxed weights on the
/// adjacency pattern and the dense N x N masked logit matrix A'.
struct AttentionView {
  SparseMatrix weights;
  Matrix masked_logits;
};
AttentionView attention_view(const GTLayerParams& p, const Matrix& x, const SparseMatrix& adjacency,
                             const SparseMatrix& mask, const LayerOptions& opts);

/// Encoder input: [X~ | PE] with the ablation switches applied.
Matrix encoder_input(const ModelConfig& cfg, const SpectralBundle& bundle, const Graph& g);

struct EncoderCache {
  std::vector<LayerCache> layers;
};

Matrix encoder_forward(const EncoderParams& params, const ModelConfig& cfg,
                       const SpectralBundle& bundle, const Graph& g,
                       EncoderCache* cache = nullptr, std::mt19937_64* rng = nullptr);

/// Same as encoder_forward for a prepared input and mask.
Matrix encoder_forward_input(const EncoderParams& params, const ModelConfig& cfg, const Matrix& input,
                             const SparseMatrix& adjacency, const SparseMatrix& mask,
                             EncoderCache* cache = nullptr, std::mt19937_64* rng = nullptr);

/// softmax(q k^T / sqrt(d_k)) v.
Matrix scaled_dot_attention(const Matrix& q, const Matrix& k, const Matrix& v);

/// sigmoid(z z^T).
Matrix decode_adjacency(const Matrix& z);

/// Row softmax of z * cluster_w.
Matrix clustering_forward(const Matrix& z, const Matrix& cluster_w);

/// Row argmax, ties to the lowest index.
Labels hard_assignments(const Matrix& y);

/// Numerically stable row softmax.
Matrix row_softmax(const Matrix& logits);

struct Checkpoint {
  ModelConfig config;
  EncoderParams params;
  Index input_dim = 0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gtagc
