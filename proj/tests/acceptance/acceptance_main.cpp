// SPDX-License-Identifier: Apache-2.0
// Acceptance runner: one PASS/FAIL/SKIP line per criterion.
//
//   gtagc_acceptance --group properties      criteria 6-12, synthetic only
//   gtagc_acceptance --group reproduction    criteria 1-5, needs Cora/Citeseer
//
// The reproduction group looks for <dir>/citeseer/citeseer.{content,cites}
// and <dir>/cora/cora.{content,cites} under --data-dir, $GTAGC_DATA_DIR or
// <source>/data. It exits 77 when neither dataset is present.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>

#include "../fixtures.hpp"
#include "../reference.hpp"
#include "gtagc/config.hpp"
#include "gtagc/error.hpp"
#include "gtagc/experiment.hpp"
#include "gtagc/metrics.hpp"
#include "gtagc/spectral.hpp"
#include "gtagc/training.hpp"

using namespace gtagc;
using namespace gtagc::test;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip, Info };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

const char* label(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Skip: return "SKIP";
    case Verdict::Info: return "INFO";
  }
  return "?";
}

struct Report {
  int failed = 0, passed = 0, skipped = 0;

  void add(int id, const std::string& name, const Outcome& o) {
    std::printf("[%2d] %s  %-28s %s\n", id, label(o.verdict), name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.verdict == Verdict::Fail;
    passed += o.verdict == Verdict::Pass;
    skipped += o.verdict == Verdict::Skip;
  }

  // Runs `fn`, turning an escaped exception into a FAIL line.
  void run(int id, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const Error& e) {
      o = {Verdict::Fail, std::string(to_string(e.kind())) + ": " + e.what()};
    } catch (const std::exception& e) {
      o = {Verdict::Fail, e.what()};
    }
    add(id, name, o);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void jitter(EncoderParams& p, std::uint64_t seed, double sd) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sd);
  p.for_each([&](const std::string&, Matrix& t) {
    for (Index i = 0; i < t.size(); ++i) t.data()[i] += n(rng);
  });
}

// ---- 6: gradient check -------------------------------------------------------

double gradient_rel_err(double gamma, ClusteringLossKind kind, std::uint64_t seed, std::string& worst) {
  Graph g = random_graph(10, 4, 0.35, seed);
  g.features = g.features.cwiseAbs();
  g = row_normalize_features(g);
  ModelConfig cfg;
  cfg.hidden_dims = {5, 3};
  cfg.n_clusters = 3;
  cfg.gamma = gamma;
  cfg.k_pe = 2;
  const SpectralBundle b = build_spectral_bundle(g, 2, 2);
  const Matrix input = encoder_input(cfg, b, g);
  const SparseMatrix mask = mask_of(g);
  EncoderParams params = init_encoder_params(cfg, input.cols(), seed);
  jitter(params, seed + 1, 0.2);
  const Matrix z = encoder_forward_input(params, cfg, input, g.adjacency, mask);
  const Matrix target = target_distribution(clustering_forward(z, params.cluster_w));

  Objective obj;
  obj.input = &input;
  obj.adjacency = &g.adjacency;
  obj.mask = &mask;
  obj.target = &target;
  obj.alpha = 10.0;
  obj.kind = kind;

  EncoderParams grads;
  backward(params, cfg, obj, grads);
  std::vector<std::pair<std::string, Matrix*>> ps, gs;
  params.for_each([&](const std::string& n, Matrix& t) { ps.emplace_back(n, &t); });
  grads.for_each([&](const std::string& n, Matrix& t) { gs.emplace_back(n, &t); });

  const double h = 1e-4;
  double max_err = 0.0;
  for (std::size_t t = 0; t < ps.size(); ++t) {
    Matrix& param = *ps[t].second;
    Matrix fd(param.rows(), param.cols());
    for (Index i = 0; i < param.size(); ++i) {
      const double keep = param.data()[i];
      param.data()[i] = keep + h;
      const double up = evaluate_loss(params, cfg, obj).total;
      param.data()[i] = keep - h;
      const double down = evaluate_loss(params, cfg, obj).total;
      param.data()[i] = keep;
      fd.data()[i] = (up - down) / (2 * h);
    }
    const Matrix& an = *gs[t].second;
    const double err = (an - fd).norm() / std::max({an.norm(), fd.norm(), 1e-7});
    if (err > max_err) {
      max_err = err;
      worst = ps[t].first;
    }
  }
  return max_err;
}

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_err = 0.0;
  std::string worst_where;
  for (double gamma : {0.0, 0.5, 1.0})
    for (auto kind : {ClusteringLossKind::KlSelfTrain, ClusteringLossKind::BinaryCe}) {
      std::string tensor;
      const double e = gradient_rel_err(gamma, kind, 7, tensor);
      if (e >= worst_err) {
        worst_err = e;
        worst_where = fmt("gamma=%g %s %s", gamma, kind == ClusteringLossKind::KlSelfTrain ? "kl" : "bce",
                          tensor.c_str());
      }
    }
  const double secs = seconds_since(t0);
  return verdict(worst_err < 1e-3 && secs < 60.0,
                 fmt("max rel err %.2e (< 1e-3) at %s; %.1fs (< 60s)", worst_err, worst_where.c_str(), secs));
}

// ---- 7: oracle equivalence ---------------------------------------------------

Outcome oracle_equivalence() {
  double worst = 0.0;
  int cases = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const Index n = 8 + static_cast<Index>(seed % 3) * 6;  // 8, 14, 20
    Graph g = random_graph(n, 5, 0.25, seed);
    ModelConfig cfg;
    cfg.hidden_dims = {7, 4};
    cfg.n_clusters = 2;
    cfg.k_pe = 3;
    cfg.gamma = 0.25 * static_cast<double>(seed % 5);
    cfg.norm_mode = seed % 2 ? NormMode::PerNode : NormMode::Batch;
    cfg.disable_global_attention = seed % 4 == 3;
    cfg.disable_self_attention = seed % 6 == 5;
    const SpectralBundle b = build_spectral_bundle(g, cfg.filter_order, cfg.k_pe);
    const Matrix input = encoder_input(cfg, b, g);
    EncoderParams p = init_encoder_params(cfg, input.cols(), seed);
    jitter(p, seed + 100, 0.3);
    const Matrix z = encoder_forward_input(p, cfg, input, g.adjacency, mask_of(g));
    worst = std::max(worst, rel_err(z, reference_encoder(p, cfg, input, g)));
    ++cases;
  }
  return verdict(worst < 1e-5, fmt("max rel err %.2e (< 1e-5) over %d graphs, N <= 20", worst, cases));
}

// ---- 8: attention invariants -------------------------------------------------

Outcome attention_invariants() {
  double row_dev = 0.0;
  long sentinel_bad = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = random_graph(18, 4, 0.2, seed);
    ModelConfig cfg;
    cfg.hidden_dims = {6};
    cfg.gamma = 0.1 * static_cast<double>(seed % 11);
    EncoderParams p = init_encoder_params(cfg, 4, seed);
    jitter(p, seed, 0.3);
    const AttentionView v = attention_view(p.layers[0], g.features, g.adjacency, mask_of(g), layer_options(cfg));
    const Matrix w = Matrix(v.weights);
    for (Index i = 0; i < g.n_nodes; ++i) {
      if (g.degree(i) > 0) row_dev = std::max(row_dev, std::abs(w.row(i).sum() - 1.0));
      else sentinel_bad += w.row(i).sum() != 0.0;
      for (Index j = 0; j < g.n_nodes; ++j) {
        const bool edge = g.adjacency.coeff(i, j) != 0.0;
        sentinel_bad += edge == (v.masked_logits(i, j) == kMaskSentinel);
        sentinel_bad += !edge && w(i, j) != 0.0;
      }
    }
  }

  // gamma = 1: the global vector has no influence. gamma = 0: the global
  // term is constant along each row, so attention is uniform and the local
  // vector has no influence either.
  Graph g = random_graph(16, 4, 0.3, 8);
  const SparseMatrix m = mask_of(g);
  ModelConfig cfg;
  cfg.hidden_dims = {5};
  EncoderParams p = init_encoder_params(cfg, 4, 3);
  jitter(p, 4, 0.5);
  auto weights = [&](const GTLayerParams& layer, double gamma) {
    LayerOptions o = layer_options(cfg);
    o.gamma = gamma;
    return Matrix(attention_view(layer, g.features, g.adjacency, m, o).weights);
  };
  GTLayerParams shifted = p.layers[0];
  shifted.a_global.array() += 1.7;
  shifted.a_local.array() -= 0.9;
  GTLayerParams global_only = p.layers[0];
  global_only.a_global.array() += 1.7;
  const double dead_global = (weights(p.layers[0], 1.0) - weights(global_only, 1.0)).cwiseAbs().maxCoeff();
  const double live_local = (weights(p.layers[0], 1.0) - weights(shifted, 1.0)).cwiseAbs().maxCoeff();
  const Matrix w0 = weights(shifted, 0.0);
  double uniform_dev = 0.0;
  for (Index i = 0; i < g.n_nodes; ++i)
    for (Index j = 0; j < g.n_nodes; ++j)
      if (g.adjacency.coeff(i, j) != 0.0)
        uniform_dev = std::max(uniform_dev, std::abs(w0(i, j) - 1.0 / static_cast<double>(g.degree(i))));

  const bool ok = row_dev <= 1e-6 && sentinel_bad == 0 && dead_global == 0.0 && live_local > 1e-6 && uniform_dev < 1e-12;
  return verdict(ok, fmt("row-sum dev %.1e, sentinel violations %ld, gamma=1 a_global effect %.1e, "
                         "a_local effect %.1e, gamma=0 uniform dev %.1e",
                         row_dev, sentinel_bad, dead_global, live_local, uniform_dev));
}

// ---- 9: metric oracles -------------------------------------------------------

double assignment_cost(const Matrix& cost, const std::vector<int>& a) {
  double c = 0;
  for (Index r = 0; r < cost.rows(); ++r) c += cost(r, a[static_cast<std::size_t>(r)]);
  return c;
}

double exhaustive_min(const Matrix& cost) {
  std::vector<int> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do best = std::min(best, assignment_cost(cost, perm));
  while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Labels relabel(const Labels& x, std::mt19937_64& rng) {
  const int k = *std::max_element(x.begin(), x.end()) + 1;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Labels out = x;
  for (int& v : out) v = perm[static_cast<std::size_t>(v)];
  return out;
}

Outcome metric_oracles() {
  std::mt19937_64 rng(2024);
  int hungarian_bad = 0;
  std::uniform_int_distribution<int> v(-20, 50);
  for (int rep = 0; rep < 200; ++rep) {
    const Index k = 1 + rep % 6;
    Matrix c(k, k);
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = v(rng);
    hungarian_bad += assignment_cost(c, hungarian(c)) != exhaustive_min(c);
  }

  // Hand fixtures with values worked out by hand; NMI frozen from an
  // external implementation.
  int fixture_bad = 0;
  auto expect = [&](double got, double want, double tol = 0.0) { fixture_bad += std::abs(got - want) > tol; };
  expect(accuracy({0, 0, 1, 1}, {1, 1, 0, 0}).acc, 1.0);
  expect(accuracy({0, 0, 1, 1}, {0, 1, 0, 1}).acc, 0.5);
  expect(accuracy({0, 0, 1, 2, 2, 2}, {1, 1, 1, 0, 0, 2}).acc, 4.0 / 6.0, 1e-15);
  expect(nmi({0, 0, 1, 1}, {1, 1, 0, 0}), 1.0);
  expect(nmi({0, 0, 1, 1}, {0, 1, 0, 1}), 0.0, 1e-15);
  expect(nmi({0, 0, 1, 1}, {0, 0, 0, 1}), 0.3455920299442113, 1e-12);
  expect(ari({0, 0, 1, 1}, {1, 1, 0, 0}), 1.0);
  expect(ari({0, 0, 1, 1}, {0, 0, 1, 0}), 0.0, 1e-15);
  expect(ari({0, 0, 1, 1, 2, 2}, {0, 0, 0, 0, 0, 0}), 0.0, 1e-15);
  expect(mapped_macro_f({0, 0, 1, 1}, {0, 1, 1, 1}), (2.0 / 3.0 + 0.8) / 2.0, 1e-15);
  expect(mapped_macro_f({0, 1, 2}, {0, 0, 0}), 0.5 / 3.0, 1e-15);

  int relabel_bad = 0;
  std::uniform_int_distribution<int> lab(0, 3);
  for (int rep = 0; rep < 100; ++rep) {
    Labels t(40), p(40);
    for (auto& x : t) x = lab(rng);
    for (auto& x : p) x = lab(rng);
    t[0] = p[0] = 3;  // keep the maximum label present
    const EvalReport a = evaluate(t, p);
    const EvalReport b = evaluate(relabel(t, rng), relabel(p, rng));
    relabel_bad += std::abs(a.acc - b.acc) > 1e-12 || std::abs(a.nmi - b.nmi) > 1e-12 ||
                   std::abs(a.fscore - b.fscore) > 1e-12 || std::abs(a.ari - b.ari) > 1e-12;
  }
  return verdict(hungarian_bad + fixture_bad + relabel_bad == 0,
                 fmt("hungarian mismatches %d/200, fixture mismatches %d, relabeling mismatches %d/100",
                     hungarian_bad, fixture_bad, relabel_bad));
}

// ---- 10: spectral invariants -------------------------------------------------

Matrix dense_laplacian(const Graph& g) {
  Matrix a = Matrix(g.adjacency) + Matrix::Identity(g.n_nodes, g.n_nodes);
  const Vector d = a.rowwise().sum();
  Matrix l(g.n_nodes, g.n_nodes);
  for (Index i = 0; i < g.n_nodes; ++i)
    for (Index j = 0; j < g.n_nodes; ++j) l(i, j) = (i == j ? 1.0 : 0.0) - a(i, j) / std::sqrt(d(i) * d(j));
  return l;
}

Outcome spectral_invariants() {
  double lo = 1.0, hi = 1.0, filter_err = 0.0, residual = 0.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Index n = 20 + static_cast<Index>(seed) * 36;  // up to 200
    Graph g = random_graph(n, 6, 4.0 / static_cast<double>(n), seed);
    const SparseMatrix l = normalized_laplacian(g);
    const Matrix dl = dense_laplacian(g);
    Eigen::SelfAdjointEigenSolver<Matrix> es{dl};
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());

    const Matrix s = Matrix::Identity(n, n) - dl;
    Matrix power = Matrix::Identity(n, n);
    for (int t = 0; t <= 4; ++t) {
      filter_err = std::max(filter_err, rel_err(laplacian_filter(g.features, l, t), power * g.features));
      power = power * s;
    }

    for (Index threshold : {Index{5000}, Index{0}}) {  // dense path, then Lanczos
      EigenSolverOptions opts;
      opts.dense_threshold = threshold;
      const EigenPairs ep = laplacian_eigenvectors(l, 8, opts);
      for (Index c = 0; c < ep.vectors.cols(); ++c)
        residual = std::max(residual, (l * ep.vectors.col(c) - ep.values(c) * ep.vectors.col(c)).norm());
    }
  }
  const bool ok = lo >= -1e-12 && hi <= 2.0 + 1e-12 && filter_err <= 1e-8 && residual <= 1e-6;
  return verdict(ok, fmt("eigenvalues in [%.3g, %.6f] (within [0, 2]), filter rel err %.1e (<= 1e-8), "
                         "eigenpair residual %.1e (<= 1e-6)",
                         lo, hi, filter_err, residual));
}

// ---- 11: synthetic end-to-end ------------------------------------------------

ModelConfig clique_model() {
  ModelConfig m;
  m.hidden_dims = {16, 4};
  m.n_clusters = 2;
  m.k_pe = 4;
  return m;
}

Outcome two_clique_end_to_end() {
  const Graph g = two_cliques();
  const ModelConfig m = clique_model();
  const SpectralBundle b = build_spectral_bundle(g, m.filter_order, m.k_pe);
  TrainConfig t;
  t.seed = 3;
  const TrainResult a = train(g, b, m, t);
  const TrainResult c = train(g, b, m, t);
  const double acc = accuracy(*g.labels, a.assignments).acc;
  const bool same = a.assignments == c.assignments && a.embedding == c.embedding;
  return verdict(acc == 1.0 && a.history.size() <= 200 && same,
                 fmt("ACC %.4f (== 1.0) after %zu epochs (<= 200), repeat run identical: %s", acc,
                     a.history.size(), same ? "yes" : "no"));
}

// ---- 12: determinism ---------------------------------------------------------

Outcome metrics_csv_determinism() {
  const fs::path root = temp_dir("acceptance_determinism");
  RunConfig cfg = default_run_config();
  cfg.model = clique_model();
  cfg.train.max_epochs = 120;
  cfg.train.pretrain_epochs = 40;
  cfg.train.patience = 60;
  cfg.model.dropout = 0.1;
  cfg.seed = 11;
  cfg.threads = 1;
  const Graph g = two_cliques(2);
  std::string bytes[2];
  for (int i = 0; i < 2; ++i) {
    cfg.output_dir = root / (i ? "b" : "a");
    cfg.cache_dir = cfg.output_dir / "cache";
    run_train(cfg, g);
    bytes[i] = read_file(cfg.output_dir / "seed_11" / "metrics.csv");
  }
  fs::remove_all(root);
  return verdict(!bytes[0].empty() && bytes[0] == bytes[1],
                 fmt("metrics.csv %zu bytes, identical: %s", bytes[0].size(), bytes[0] == bytes[1] ? "yes" : "no"));
}

// ---- 1-5: reproduction -------------------------------------------------------

struct Dataset {
  std::string name;
  fs::path content, cites;
  int k = 0;
};

std::optional<Dataset> find_dataset(const fs::path& dir, const std::string& name, int k) {
  Dataset d{name, dir / name / (name + ".content"), dir / name / (name + ".cites"), k};
  if (fs::exists(d.content) && fs::exists(d.cites)) return d;
  return std::nullopt;
}

DataConfig data_config(const std::string& name, const fs::path& content, const fs::path& cites, int k) {
  DataConfig d;
  d.name = name;
  d.content = content;
  d.cites = cites;
  d.expected_clusters = k;
  return d;
}

struct SeedStats {
  EvalReport mean;
  double max_seconds = 0.0;
  std::vector<double> accs;
};

SeedStats run_seeds(const Dataset& ds, const Graph& g, const fs::path& out, int seeds, int threads,
                    const std::function<void(RunConfig&)>& tweak = {}) {
  RunConfig cfg = default_run_config();
  cfg.data.name = ds.name;
  cfg.data.content = ds.content;
  cfg.data.cites = ds.cites;
  cfg.data.expected_clusters = ds.k;
  cfg.output_dir = out;
  cfg.cache_dir = out.parent_path() / "cache";
  cfg.runs = seeds;
  cfg.threads = threads;
  if (tweak) tweak(cfg);
  SeedStats s;
  std::vector<EvalReport> reports;
  for (const auto& o : run_train(cfg, g)) {
    if (!o.report) throw Error(ErrorKind::InvalidArgument, ds.name + " has no labels to score against");
    reports.push_back(*o.report);
    s.accs.push_back(o.report->acc);
    s.max_seconds = std::max(s.max_seconds, o.seconds);
  }
  s.mean = mean_report(reports);
  return s;
}

std::string report_text(const EvalReport& r) {
  return fmt("ACC %.4f NMI %.4f F %.4f ARI %.4f", r.acc, r.nmi, r.fscore, r.ari);
}

Outcome gate(const SeedStats& s, double acc, double nmi_min, double f, double ari_min) {
  const bool ok = s.mean.acc >= acc && s.mean.nmi >= nmi_min && s.mean.fscore >= f && s.mean.ari >= ari_min &&
                  s.max_seconds <= 1800.0;
  return verdict(ok, report_text(s.mean) + fmt(" (>= %.2f/%.2f/%.2f/%.2f); slowest seed %.0fs (<= 1800s)", acc,
                                               nmi_min, f, ari_min, s.max_seconds));
}

int reproduction(Report& rep, const fs::path& data_dir, const fs::path& work, int threads, bool pubmed) {
  const auto citeseer = find_dataset(data_dir, "citeseer", 6);
  const auto cora = find_dataset(data_dir, "cora", 7);
  const std::string missing = "dataset not found under " + data_dir.string();

  std::optional<SeedStats> full;
  std::optional<Graph> cg;
  if (citeseer) {
    cg = load_dataset(data_config("citeseer", citeseer->content, citeseer->cites, 6));
    rep.run(1, "citeseer reproduction", [&] {
      full = run_seeds(*citeseer, *cg, work / "citeseer_full", 5, threads);
      return gate(*full, 0.66, 0.41, 0.61, 0.42);
    });
  } else {
    rep.add(1, "citeseer reproduction", {Verdict::Skip, missing});
  }

  if (cora) {
    rep.run(2, "cora reproduction", [&] {
      const Graph g = load_dataset(
          data_config("cora", cora->content, cora->cites, 7));
      return gate(run_seeds(*cora, g, work / "cora_full", 5, threads), 0.67, 0.50, 0.65, 0.44);
    });
  } else {
    rep.add(2, "cora reproduction", {Verdict::Skip, missing});
  }

  if (citeseer && full) {
    rep.run(3, "ablation ordering", [&] {
      std::string detail = fmt("full %.4f", full->mean.acc);
      bool ok = true;
      for (const char* preset : {"filter_only", "pe_only", "global_only"}) {
        const SeedStats s = run_seeds(*citeseer, *cg, work / (std::string("citeseer_") + preset), 5, threads,
                                      [&](RunConfig& c) { apply_ablation(c.model, preset); });
        ok = ok && full->mean.acc > s.mean.acc;
        detail += fmt(" > %s %.4f", preset, s.mean.acc);
      }
      return verdict(ok, detail);
    });
    rep.run(4, "gamma sensitivity", [&] {
      // Seeds 0-2 at the default gamma are the first three full-model runs.
      const double at_075 = std::accumulate(full->accs.begin(), full->accs.begin() + 3, 0.0) / 3.0;
      double acc_at[2];
      for (int i = 0; i < 2; ++i)
        acc_at[i] = run_seeds(*citeseer, *cg, work / fmt("citeseer_gamma_%d", i), 3, threads,
                              [&](RunConfig& c) { c.model.gamma = i; })
                        .mean.acc;
      return verdict(at_075 >= acc_at[0] && at_075 >= acc_at[1],
                     fmt("ACC gamma=0.75 %.4f >= gamma=0 %.4f and gamma=1 %.4f", at_075, acc_at[0], acc_at[1]));
    });
  } else {
    rep.add(3, "ablation ordering", {Verdict::Skip, citeseer ? "citeseer run failed" : missing});
    rep.add(4, "gamma sensitivity", {Verdict::Skip, citeseer ? "citeseer run failed" : missing});
  }

  const auto pm = find_dataset(data_dir, "pubmed", 3);
  if (pubmed && pm) {
    const auto t0 = std::chrono::steady_clock::now();
    const Graph g = load_dataset(
        data_config("pubmed", pm->content, pm->cites, 3));
    const SeedStats s = run_seeds(*pm, g, work / "pubmed_full", 1, threads);
    rep.add(5, "pubmed (not a gate)", {Verdict::Info, report_text(s.mean) + fmt(", %.0fs", seconds_since(t0))});
  } else {
    rep.add(5, "pubmed (not a gate)", {Verdict::Info, "not run; pass --pubmed with pubmed/ under the data dir"});
  }

  if (!citeseer && !cora) return 77;
  return rep.failed ? 1 : 0;
}

int properties(Report& rep) {
  rep.run(6, "gradient check", gradient_check);
  rep.run(7, "oracle equivalence", oracle_equivalence);
  rep.run(8, "attention invariants", attention_invariants);
  rep.run(9, "metric oracles", metric_oracles);
  rep.run(10, "spectral invariants", spectral_invariants);
  rep.run(11, "two-clique end-to-end", two_clique_end_to_end);
  rep.run(12, "metrics CSV determinism", metrics_csv_determinism);
  return rep.failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gtagc acceptance suite"};
  std::string group = "all";
  fs::path data_dir, work = fs::temp_directory_path() / "gtagc_acceptance";
  int threads = 1;
  bool pubmed = false;
  app.add_option("--group", group, "properties, reproduction or all")
      ->check(CLI::IsMember({"properties", "reproduction", "all"}));
  app.add_option("--data-dir", data_dir, "directory holding citeseer/, cora/ and optionally pubmed/");
  app.add_option("--work-dir", work, "output directory for reproduction runs");
  app.add_option("--threads", threads, "seeds trained in parallel")->check(CLI::PositiveNumber);
  app.add_flag("--pubmed", pubmed, "also run the optional pubmed reproduction");
  CLI11_PARSE(app, argc, argv);

  if (data_dir.empty()) {
    if (const char* env = std::getenv("GTAGC_DATA_DIR")) data_dir = env;
    else data_dir = fs::path(GTAGC_SOURCE_DIR) / "data";
  }

  Report rep;
  int code = 0;
  if (group != "reproduction") code = properties(rep);
  if (group != "properties") {
    const int r = reproduction(rep, data_dir, work, threads, pubmed);
    if (r == 1 || code == 1) code = 1;
    else if (r == 77 && group == "reproduction") code = 77;
  }
  std::printf("%d passed, %d failed, %d skipped\n", rep.passed, rep.failed, rep.skipped);
  return code;
}
