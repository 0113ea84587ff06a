// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gtagc/graph.hpp"
#include "gtagc/metrics.hpp"
#include "gtagc/model.hpp"
#include "gtagc/spectral.hpp"

namespace gtagc {

enum class ClusteringLossKind { KlSelfTrain, BinaryCe };

struct TrainConfig {
  double lr = 0.001;
  int max_epochs = 200;
  int patience = 80;
  double alpha = 10.0;
  int pretrain_epochs = 50;
  int target_update_interval = 5;
  std::uint64_t seed = 0;
  ClusteringLossKind clustering_loss_kind = ClusteringLossKind::KlSelfTrain;
  int kmeans_restarts = 10;
  int eval_interval = 10;  // epochs between metric rows when labels exist; 0 disables

  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

struct LossBreakdown {
  double reconstruction = 0.0;
  double clustering = 0.0;
  double total = 0.0;
};

struct AdamState {
  EncoderParams m;
  EncoderParams v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const EncoderParams& params);
};

/// Mean weighted binary cross-entropy of a_pred against A + I. Positive
/// entries are weighted by #zeros / #ones.
double reconstruction_loss(const Matrix& a_pred, const SparseMatrix& adjacency);

/// reconstruction_loss(decode_adjacency(z)) evaluated from logits in row
/// blocks; accumulates d loss / d z into `dz` when given.
double reconstruction_loss_from_embedding(const Matrix& z, const SparseMatrix& adjacency,
                                          Matrix* dz = nullptr);

/// Self-training target: squares each soft assignment and divides by the
/// cluster mass, then renormalises rows.
Matrix target_distribution(const Matrix& y);

double clustering_loss(const Matrix& y, const Matrix& p, ClusteringLossKind kind);

LossBreakdown total_loss(double recon, double clust, double alpha);

/// Everything a loss evaluation needs besides the parameters.
struct Objective {
  const Matrix* input = nullptr;          // encoder input, N x D_in
  const SparseMatrix* adjacency = nullptr;
  const SparseMatrix* mask = nullptr;
  const Matrix* target = nullptr;         // P; null means reconstruction only
  double alpha = 0.0;
  ClusteringLossKind kind = ClusteringLossKind::KlSelfTrain;
};

LossBreakdown evaluate_loss(const EncoderParams& params, const ModelConfig& cfg, const Objective& obj);

/// Reverse-mode gradients of the total loss for every parameter tensor.
/// `grads` is overwritten and takes the shape of `params`. Throws
/// ErrorKind::NonFinite naming the offending tensor.
LossBreakdown backward(const EncoderParams& params, const ModelConfig& cfg, const Objective& obj,
                       EncoderParams& grads, std::mt19937_64* rng = nullptr);

/// One bias-corrected Adam update.
void adam_step(EncoderParams& params, const EncoderParams& grads, AdamState& state, double lr);

/// Sets cluster head column j to c_j / ||c_j||^2.
Matrix cluster_head_from_centroids(const Matrix& centroids);

struct EpochRecord {
  int epoch = 0;
  bool joint = false;  // false during reconstruction-only pretraining
  LossBreakdown loss;
  std::optional<double> best_total;  // joint phase only
  std::optional<EvalReport> eval;
};

struct TrainResult {
  EncoderParams params;
  std::vector<EpochRecord> history;
  int best_epoch = -1;
  bool stopped_early = false;
  Matrix embedding;     // Z at the restored parameters
  Matrix soft_assign;   // Y at the restored parameters
  Labels assignments;
};

/// Reconstruction-only pretraining, k-means head initialisation, then joint
/// training with a periodically refreshed target and early stopping.
TrainResult train(const Graph& g, const SpectralBundle& bundle, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg);

}  // namespace gtagc
