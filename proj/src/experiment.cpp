// SPDX-License-Identifier: Apache-2.0
#include "gtagc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "gtagc/csv.hpp"
#include "gtagc/error.hpp"

namespace gtagc {

namespace fs = std::filesystem;

namespace {

CsvRow report_fields(const std::optional<EvalReport>& r) {
  if (!r) return {"", "", "", ""};
  return {format_number(r->acc), format_number(r->nmi), format_number(r->fscore), format_number(r->ari)};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

fs::path cache_dir_of(const RunConfig& cfg) {
  return cfg.cache_dir.empty() ? cfg.output_dir / "cache" : cfg.cache_dir;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, count); ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

Graph load_dataset(const DataConfig& data) {
  Graph g;
  if (!data.content.empty()) {
    if (data.cites.empty()) throw Error(ErrorKind::Config, "data.content is set but data.cites is not");
    g = load_content_cites({data.content, data.cites, data.expected_clusters});
  } else if (!data.features.empty()) {
    if (data.edges.empty()) throw Error(ErrorKind::Config, "data.features is set but data.edges is not");
    g = load_edge_list(data.edges, data.features, data.labels);
    if (data.expected_clusters > 0 && g.labels && g.n_classes != data.expected_clusters)
      g.diagnostics.class_count_mismatch = g.n_classes;
  } else {
    throw Error(ErrorKind::Config, "no dataset configured: set data.content/data.cites or data.edges/data.features");
  }
  const auto& d = g.diagnostics;
  if (d.dangling_edges) std::fprintf(stderr, "warning: %s: dropped %zu edges with unknown endpoints\n", data.name.c_str(), d.dangling_edges);
  if (d.self_loops) std::fprintf(stderr, "warning: %s: dropped %zu self-loops\n", data.name.c_str(), d.self_loops);
  if (d.class_count_mismatch)
    std::fprintf(stderr, "warning: %s: found %d classes, expected %d\n", data.name.c_str(), *d.class_count_mismatch,
                 data.expected_clusters);
  if (data.normalize_features) g = row_normalize_features(std::move(g));
  return g;
}

SpectralBundle prepare_spectral(const Graph& g, const ModelConfig& model, const fs::path& cache_dir) {
  if (cache_dir.empty()) return build_spectral_bundle(g, model.filter_order, model.k_pe);
  fs::create_directories(cache_dir);
  const auto fp = fingerprint(g);
  char name[96];
  std::snprintf(name, sizeof name, "%016llx_t%d_k%d.spb", static_cast<unsigned long long>(fp),
                model.filter_order, model.k_pe);
  const fs::path path = cache_dir / name;
  if (auto cached = load_spectral_bundle(path, fp, model.filter_order, model.k_pe)) return std::move(*cached);
  auto bundle = build_spectral_bundle(g, model.filter_order, model.k_pe);
  // Write-then-rename so concurrent runs never observe a partial file.
  const fs::path tmp = path.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  save_spectral_bundle(tmp, bundle, fp);
  fs::rename(tmp, path);
  return bundle;
}

ModelConfig resolve_model(const RunConfig& cfg, const Graph& g) {
  ModelConfig m = cfg.model;
  if (m.n_clusters == 0) {
    if (cfg.data.expected_clusters > 0) m.n_clusters = cfg.data.expected_clusters;
    else if (g.labels) m.n_clusters = g.n_classes;
    else throw Error(ErrorKind::Config, "model.n_clusters is 0 and the dataset has no labels");
  }
  m.validate();
  return m;
}

RunOutcome run_single(const RunConfig& cfg, const Graph& g, const SpectralBundle& bundle, std::uint64_t seed,
                      const fs::path& dir) {
  fs::create_directories(dir);
  const ModelConfig model = resolve_model(cfg, g);
  TrainConfig tc = cfg.train;
  tc.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  TrainResult res = train(g, bundle, model, tc);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunOutcome out;
  out.seed = seed;
  out.dir = dir;
  out.best_epoch = res.best_epoch;
  out.epochs_run = static_cast<int>(res.history.size());
  out.seconds = seconds;
  if (g.labels) out.report = evaluate(*g.labels, res.assignments);

  Checkpoint ckpt{model, res.params, encoder_input(model, bundle, g).cols()};
  save_checkpoint(dir / "checkpoint.bin", ckpt);

  RunConfig resolved = cfg;
  resolved.model = model;
  resolved.seed = seed;
  resolved.runs = 1;
  write_text(dir / "config.ini", format_run_config(resolved));

  std::vector<CsvRow> hist;
  for (const auto& rec : res.history) {
    CsvRow row{std::to_string(rec.epoch), rec.joint ? "joint" : "pretrain", format_number(rec.loss.reconstruction),
               format_number(rec.loss.clustering), format_number(rec.loss.total),
               rec.best_total ? format_number(*rec.best_total) : ""};
    for (auto& f : report_fields(rec.eval)) row.push_back(std::move(f));
    hist.push_back(std::move(row));
  }
  write_csv(dir / "history.csv", {"epoch", "phase", "recon", "clust", "total", "best_total", "acc", "nmi", "fscore", "ari"},
            hist);

  std::vector<CsvRow> assign;
  for (Index i = 0; i < g.n_nodes; ++i)
    assign.push_back({g.names[static_cast<std::size_t>(i)], std::to_string(res.assignments[static_cast<std::size_t>(i)])});
  write_csv(dir / "assignments.csv", {"node", "cluster"}, assign);

  if (out.report) write_csv(dir / "metrics.csv", {"acc", "nmi", "fscore", "ari"}, {report_fields(out.report)});
  write_csv(dir / "timing.csv", {"seconds", "epochs_run", "best_epoch"},
            {{format_number(seconds), std::to_string(out.epochs_run), std::to_string(out.best_epoch)}});
  return out;
}

std::vector<RunOutcome> run_train(const RunConfig& cfg) { return run_train(cfg, load_dataset(cfg.data)); }

std::vector<RunOutcome> run_train(const RunConfig& cfg, const Graph& g) {
  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "config.ini", format_run_config(cfg));
  const ModelConfig model = resolve_model(cfg, g);
  const SpectralBundle bundle = prepare_spectral(g, model, cache_dir_of(cfg));

  const auto seeds = cfg.seeds();
  std::vector<RunOutcome> outcomes(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), cfg.threads, [&](int i) {
    const auto seed = seeds[static_cast<std::size_t>(i)];
    outcomes[static_cast<std::size_t>(i)] =
        run_single(cfg, g, bundle, seed, cfg.output_dir / ("seed_" + std::to_string(seed)));
  });

  std::vector<CsvRow> rows;
  std::vector<EvalReport> reports;
  for (const auto& o : outcomes) {
    CsvRow row{std::to_string(o.seed)};
    for (auto& f : report_fields(o.report)) row.push_back(std::move(f));
    rows.push_back(std::move(row));
    if (o.report) reports.push_back(*o.report);
  }
  if (!reports.empty()) {
    CsvRow mean{"mean"};
    for (auto& f : report_fields(mean_report(reports))) mean.push_back(std::move(f));
    rows.push_back(std::move(mean));
  }
  write_csv(cfg.output_dir / "summary.csv", {"seed", "acc", "nmi", "fscore", "ari"}, rows);
  return outcomes;
}

EvalOutcome run_eval(const fs::path& checkpoint, const RunConfig& cfg, const fs::path& out_dir,
                     bool export_embeddings) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const Graph g = load_dataset(cfg.data);
  const SpectralBundle bundle = prepare_spectral(g, ckpt.config, cache_dir_of(cfg));
  const Matrix input = encoder_input(ckpt.config, bundle, g);
  if (input.cols() != ckpt.input_dim)
    throw Error(ErrorKind::DimensionMismatch,
                "checkpoint expects input " + std::to_string(g.n_nodes) + "x" + std::to_string(ckpt.input_dim) +
                    " but dataset gives " + std::to_string(input.rows()) + "x" + std::to_string(input.cols()));

  EvalOutcome out;
  out.embedding = encoder_forward_input(ckpt.params, ckpt.config, input, g.adjacency, mask_of(g));
  out.assignments = hard_assignments(clustering_forward(out.embedding, ckpt.params.cluster_w));
  if (g.labels) out.report = evaluate(*g.labels, out.assignments);

  fs::create_directories(out_dir);
  if (out.report) write_csv(out_dir / "eval_metrics.csv", {"acc", "nmi", "fscore", "ari"}, {report_fields(out.report)});
  if (export_embeddings) {
    CsvRow header{"node"};
    for (Index c = 0; c < out.embedding.cols(); ++c) header.push_back("z" + std::to_string(c));
    header.push_back("cluster");
    std::vector<CsvRow> rows;
    for (Index i = 0; i < out.embedding.rows(); ++i) {
      CsvRow row{g.names[static_cast<std::size_t>(i)]};
      for (Index c = 0; c < out.embedding.cols(); ++c) row.push_back(format_number(out.embedding(i, c)));
      row.push_back(std::to_string(out.assignments[static_cast<std::size_t>(i)]));
      rows.push_back(std::move(row));
    }
    write_csv(out_dir / "embeddings.csv", header, rows);
  }
  return out;
}

void apply_ablation(ModelConfig& model, const std::string& preset) {
  bool filter = true, pe = true, global = true;
  if (preset == "full") {
  } else if (preset == "baseline") {
    filter = pe = global = false;
  } else if (preset == "filter_only") {
    pe = global = false;
  } else if (preset == "pe_only") {
    filter = global = false;
  } else if (preset == "global_only") {
    filter = pe = false;
  } else {
    throw Error(ErrorKind::Config, "unknown ablation preset '" + preset +
                                       "' (expected full, baseline, filter_only, pe_only or global_only)");
  }
  model.disable_filter = !filter;
  model.disable_pe = !pe;
  model.disable_global_attention = !global;
}

EvalReport mean_report(const std::vector<EvalReport>& reports) {
  EvalReport m;
  if (reports.empty()) return m;
  for (const auto& r : reports) {
    m.acc += r.acc;
    m.nmi += r.nmi;
    m.fscore += r.fscore;
    m.ari += r.ari;
  }
  const double n = static_cast<double>(reports.size());
  m.acc /= n;
  m.nmi /= n;
  m.fscore /= n;
  m.ari /= n;
  return m;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  if (cfg.sweep.parameter.empty()) throw Error(ErrorKind::Config, "sweep.parameter is not set");
  if (cfg.sweep.values.empty()) throw Error(ErrorKind::Config, "sweep.values is empty");
  // Validate every value up front so a typo fails before hours of training.
  for (const auto& v : cfg.sweep.values) {
    RunConfig probe = cfg;
    if (cfg.sweep.parameter == "ablation") apply_ablation(probe.model, v);
    else set_config_value(probe, cfg.sweep.parameter, v);
  }

  const Graph g = load_dataset(cfg.data);
  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "config.ini", format_run_config(cfg));

  std::vector<SweepRow> rows;
  for (const auto& value : cfg.sweep.values) {
    RunConfig run = cfg;
    if (cfg.sweep.parameter == "ablation") apply_ablation(run.model, value);
    else set_config_value(run, cfg.sweep.parameter, value);
    run.output_dir = cfg.output_dir / (cfg.sweep.parameter + "=" + value);
    if (run.cache_dir.empty()) run.cache_dir = cache_dir_of(cfg);
    run.sweep = {};
    try {
      for (const auto& o : run_train(run, g)) rows.push_back({value, o.seed, o.report, "ok"});
    } catch (const Error& e) {
      for (auto s : run.seeds()) rows.push_back({value, s, std::nullopt, std::string(to_string(e.kind()))});
    } catch (const std::exception& e) {
      for (auto s : run.seeds()) rows.push_back({value, s, std::nullopt, "Error"});
    }
  }

  // Mark the value with the best mean ACC.
  std::string best_value;
  double best_acc = -1.0;
  for (const auto& value : cfg.sweep.values) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : rows)
      if (r.value == value && r.report) {
        sum += r.report->acc;
        ++n;
      }
    if (n > 0 && sum / n > best_acc) {
      best_acc = sum / n;
      best_value = value;
    }
  }
  std::vector<CsvRow> out;
  for (const auto& r : rows) {
    CsvRow row{r.value, std::to_string(r.seed)};
    for (auto& f : report_fields(r.report)) row.push_back(std::move(f));
    row.push_back(r.status);
    row.push_back(r.value == best_value ? "1" : "0");
    out.push_back(std::move(row));
  }
  write_csv(cfg.output_dir / "summary.csv", {"value", "seed", "acc", "nmi", "fscore", "ari", "status", "best"}, out);
  return rows;
}

}  // namespace gtagc
