// SPDX-License-Identifier: Apache-2.0
// gtagc: train, eval, sweep and score from the command line.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "gtagc/config.hpp"
#include "gtagc/csv.hpp"
#include "gtagc/error.hpp"
#include "gtagc/experiment.hpp"

namespace {

using namespace gtagc;
namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "INI run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides run.output_dir)");
  cmd->add_option("--seed", f.seed, "base seed (overrides run.seed)");
  cmd->add_option("--threads", f.threads, "concurrent seeds; 1 gives reproducible runs");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig cfg = load_run_config(f.config);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (cfg.threads < 1) throw Error(ErrorKind::Config, "threads must be >= 1");
  return cfg;
}

void print_table(const std::vector<std::pair<std::string, std::optional<EvalReport>>>& rows) {
  std::printf("%-12s %8s %8s %8s %8s\n", "run", "ACC", "NMI", "F", "ARI");
  for (const auto& [name, r] : rows) {
    if (r)
      std::printf("%-12s %8.4f %8.4f %8.4f %8.4f\n", name.c_str(), r->acc, r->nmi, r->fscore, r->ari);
    else
      std::printf("%-12s %8s %8s %8s %8s\n", name.c_str(), "-", "-", "-", "-");
  }
}

// One label per line, or a CSV whose last column is the label (header
// detected by a non-numeric "cluster"/"label" field). Labels of any text
// map to dense ids in first-appearance order.
Labels read_label_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::map<std::string, int> ids;
  Labels out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string field = line.substr(line.find_last_of(',') == std::string::npos ? 0 : line.find_last_of(',') + 1);
    std::istringstream ss(field);
    std::string tok;
    ss >> tok;
    if (line_no == 1 && (tok == "cluster" || tok == "label")) continue;
    auto [it, inserted] = ids.emplace(tok, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

int cmd_train(const CommonFlags& f) {
  const RunConfig cfg = resolve(f);
  const auto outcomes = run_train(cfg);
  std::vector<std::pair<std::string, std::optional<EvalReport>>> rows;
  std::vector<EvalReport> reports;
  for (const auto& o : outcomes) {
    rows.emplace_back("seed_" + std::to_string(o.seed), o.report);
    if (o.report) reports.push_back(*o.report);
  }
  if (reports.size() > 1) rows.emplace_back("mean", mean_report(reports));
  print_table(rows);
  return 0;
}

int cmd_eval(const CommonFlags& f, const std::string& checkpoint, bool export_embeddings) {
  const RunConfig cfg = resolve(f);
  const fs::path out = f.out.empty() ? fs::path(checkpoint).parent_path() : fs::path(f.out);
  const auto res = run_eval(checkpoint, cfg, out, export_embeddings);
  print_table({{"eval", res.report}});
  return 0;
}

int cmd_sweep(const CommonFlags& f) {
  const RunConfig cfg = resolve(f);
  const auto rows = run_sweep(cfg);
  std::printf("%-24s %8s %8s %8s %8s %8s  %s\n", "value", "seed", "ACC", "NMI", "F", "ARI", "status");
  for (const auto& r : rows) {
    if (r.report)
      std::printf("%-24s %8llu %8.4f %8.4f %8.4f %8.4f  %s\n", r.value.c_str(),
                  static_cast<unsigned long long>(r.seed), r.report->acc, r.report->nmi, r.report->fscore,
                  r.report->ari, r.status.c_str());
    else
      std::printf("%-24s %8llu %8s %8s %8s %8s  %s\n", r.value.c_str(), static_cast<unsigned long long>(r.seed),
                  "-", "-", "-", "-", r.status.c_str());
  }
  return 0;
}

int cmd_score(const std::string& truth, const std::string& pred, const std::string& out) {
  const Labels t = read_label_file(truth);
  const Labels p = read_label_file(pred);
  const EvalReport r = evaluate(t, p);
  print_table({{"score", r}});
  if (!out.empty())
    write_csv(out, {"acc", "nmi", "fscore", "ari"},
              {{format_number(r.acc), format_number(r.nmi), format_number(r.fscore), format_number(r.ari)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph transformer attributed-graph clustering"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, sweep_flags;
  auto* train = app.add_subcommand("train", "train every configured seed");
  add_common(train, train_flags);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the configured dataset");
  add_common(eval, eval_flags);
  std::string checkpoint;
  bool export_embeddings = false;
  eval->add_option("--checkpoint", checkpoint, "checkpoint.bin from train")->required()->check(CLI::ExistingFile);
  eval->add_flag("--export-embeddings", export_embeddings, "write embeddings.csv");

  auto* sweep = app.add_subcommand("sweep", "train once per sweep value and seed");
  add_common(sweep, sweep_flags);

  auto* score = app.add_subcommand("score", "metrics for two label files");
  std::string truth, pred, score_out;
  score->add_option("--true", truth, "ground-truth labels")->required()->check(CLI::ExistingFile);
  score->add_option("--pred", pred, "predicted labels or assignments.csv")->required()->check(CLI::ExistingFile);
  score->add_option("--out", score_out, "CSV file for the metrics row");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(train_flags);
    if (*eval) return cmd_eval(eval_flags, checkpoint, export_embeddings);
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*score) return cmd_score(truth, pred, score_out);
  } catch (const gtagc::Error& e) {
    std::fprintf(stderr, "%s: %s\n", gtagc::to_string(e.kind()), e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "IoError: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "Error: %s\n", e.what());
    return 2;
  }
  return 1;
}
