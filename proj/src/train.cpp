// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <sstream>

#include "gtagc/error.hpp"
#include "gtagc/training.hpp"

namespace gtagc {

Matrix cluster_head_from_centroids(const Matrix& centroids) {
  // centroids: k x d  ->  head: d x k
  Matrix head(centroids.cols(), centroids.rows());
  for (Index j = 0; j < centroids.rows(); ++j) {
    const double sq = centroids.row(j).squaredNorm();
    head.col(j) = sq > 0.0 ? Vector(centroids.row(j).transpose() / sq) : Vector::Zero(centroids.cols());
  }
  return head;
}

namespace {

std::string describe(const LossBreakdown& l) {
  std::ostringstream out;
  out << "recon=" << l.reconstruction << " clust=" << l.clustering << " total=" << l.total;
  return out.str();
}

void check_finite(const LossBreakdown& l, int epoch) {
  if (!std::isfinite(l.total) || !std::isfinite(l.reconstruction) || !std::isfinite(l.clustering))
    throw Error(ErrorKind::NonFinite, "non-finite loss at epoch " + std::to_string(epoch) + " (" +
                                          describe(l) + ")");
}

}  // namespace

TrainResult train(const Graph& g, const SpectralBundle& bundle, const ModelConfig& model_cfg,
                  const TrainConfig& cfg) {
  model_cfg.validate();
  cfg.validate();
  if (model_cfg.n_clusters > g.n_nodes)
    throw Error(ErrorKind::Config, "more clusters than nodes");

  const Matrix input = encoder_input(model_cfg, bundle, g);
  const SparseMatrix mask = mask_of(g);
  std::mt19937_64 dropout_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  TrainResult result;
  result.params = init_encoder_params(model_cfg, input.cols(), cfg.seed);

  auto finish = [&](TrainResult& r) {
    r.embedding = encoder_forward_input(r.params, model_cfg, input, g.adjacency, mask);
    r.soft_assign = clustering_forward(r.embedding, r.params.cluster_w);
    r.assignments = hard_assignments(r.soft_assign);
    return std::move(r);
  };
  auto maybe_eval = [&](EpochRecord& rec, const EncoderParams& params) {
    if (!g.labels || cfg.eval_interval == 0 || rec.epoch % cfg.eval_interval != 0) return;
    const Matrix z = encoder_forward_input(params, model_cfg, input, g.adjacency, mask);
    rec.eval = evaluate(*g.labels, hard_assignments(clustering_forward(z, params.cluster_w)));
  };

  if (cfg.max_epochs == 0) return finish(result);

  AdamState adam = AdamState::for_params(result.params);
  EncoderParams grads;
  Objective obj;
  obj.input = &input;
  obj.adjacency = &g.adjacency;
  obj.mask = &mask;
  obj.kind = cfg.clustering_loss_kind;
  obj.alpha = cfg.alpha;

  const int pretrain = std::min(cfg.pretrain_epochs, cfg.max_epochs);
  int epoch = 0;
  for (; epoch < pretrain; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = backward(result.params, model_cfg, obj, grads, &dropout_rng);
    check_finite(rec.loss, epoch);
    adam_step(result.params, grads, adam, cfg.lr);
    result.history.push_back(std::move(rec));
  }

  // Initialise the head from k-means on the pretrained embedding.
  {
    const Matrix z = encoder_forward_input(result.params, model_cfg, input, g.adjacency, mask);
    const auto km = kmeans_best_of(z, model_cfg.n_clusters, cfg.seed, cfg.kmeans_restarts);
    result.params.cluster_w = cluster_head_from_centroids(km.centroids);
  }

  Matrix target;
  obj.target = &target;
  double best = std::numeric_limits<double>::infinity();
  EncoderParams best_params = result.params;
  int best_epoch = -1;
  const int joint_start = epoch;
  for (; epoch < cfg.max_epochs; ++epoch) {
    if ((epoch - joint_start) % cfg.target_update_interval == 0) {
      const Matrix z = encoder_forward_input(result.params, model_cfg, input, g.adjacency, mask);
      try {
        target = target_distribution(clustering_forward(z, result.params.cluster_w));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::CollapsedCluster) throw;
        throw Error(ErrorKind::CollapsedCluster, std::string(e.what()) + " at epoch " + std::to_string(epoch));
      }
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.joint = true;
    rec.loss = backward(result.params, model_cfg, obj, grads, &dropout_rng);
    check_finite(rec.loss, epoch);
    if (rec.loss.total < best) {
      best = rec.loss.total;
      best_params = result.params;  // the parameters this loss was measured at
      best_epoch = epoch;
    }
    rec.best_total = best;
    maybe_eval(rec, result.params);
    result.history.push_back(std::move(rec));
    if (epoch - best_epoch >= cfg.patience) {
      result.stopped_early = true;
      ++epoch;
      break;
    }
    adam_step(result.params, grads, adam, cfg.lr);
  }

  if (best_epoch >= 0) {
    result.params = std::move(best_params);
    result.best_epoch = best_epoch;
  }
  return finish(result);
}

}  // namespace gtagc
