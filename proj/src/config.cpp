// SPDX-License-Identifier: Apache-2.0
#include "gtagc/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gtagc/error.hpp"

namespace gtagc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Comma-separated items; a blank string is an empty list, a blank item is
// kept so callers can reject it.
std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (s.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw Error(ErrorKind::Config, key + ": expected " + expected + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto t = trim(v);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size()) bad_value(key, v, "a number");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto t = trim(v);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size()) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  bad_value(key, v, "true or false");
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}
std::string fmt(bool v) { return v ? "true" : "false"; }
std::string fmt(long long v) { return std::to_string(v); }

struct KeySpec {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
  bool is_path = false;
};

#define GTAGC_DOUBLE(field) \
  {[](RunConfig& c, const std::string& v) { c.field = to_double(#field, v); }, \
   [](const RunConfig& c) { return fmt(static_cast<double>(c.field)); }}
#define GTAGC_INT(field) \
  {[](RunConfig& c, const std::string& v) { c.field = static_cast<decltype(c.field)>(to_int(#field, v)); }, \
   [](const RunConfig& c) { return fmt(static_cast<long long>(c.field)); }}
#define GTAGC_BOOL(field) \
  {[](RunConfig& c, const std::string& v) { c.field = to_bool(#field, v); }, \
   [](const RunConfig& c) { return fmt(static_cast<bool>(c.field)); }}
#define GTAGC_PATH(field) \
  {[](RunConfig& c, const std::string& v) { c.field = trim(v); }, \
   [](const RunConfig& c) { return c.field.string(); }, true}

const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = {
      {"data.name", {[](RunConfig& c, const std::string& v) { c.data.name = trim(v); },
                     [](const RunConfig& c) { return c.data.name; }}},
      {"data.content", GTAGC_PATH(data.content)},
      {"data.cites", GTAGC_PATH(data.cites)},
      {"data.edges", GTAGC_PATH(data.edges)},
      {"data.features", GTAGC_PATH(data.features)},
      {"data.labels", GTAGC_PATH(data.labels)},
      {"data.expected_clusters", GTAGC_INT(data.expected_clusters)},
      {"data.normalize_features", GTAGC_BOOL(data.normalize_features)},

      {"model.hidden_dims",
       {[](RunConfig& c, const std::string& v) {
          c.model.hidden_dims.clear();
          for (const auto& item : split_list(v))
            c.model.hidden_dims.push_back(static_cast<int>(to_int("model.hidden_dims", item)));
        },
        [](const RunConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.model.hidden_dims.size(); ++i)
            out += (i ? "," : "") + std::to_string(c.model.hidden_dims[i]);
          return out;
        }}},
      {"model.gamma", GTAGC_DOUBLE(model.gamma)},
      {"model.leaky_slope", GTAGC_DOUBLE(model.leaky_slope)},
      {"model.n_clusters", GTAGC_INT(model.n_clusters)},
      {"model.dropout", GTAGC_DOUBLE(model.dropout)},
      {"model.ffn_multiplier", GTAGC_INT(model.ffn_multiplier)},
      {"model.norm_mode",
       {[](RunConfig& c, const std::string& v) {
          const auto t = trim(v);
          if (t == "batch") c.model.norm_mode = NormMode::Batch;
          else if (t == "per_node") c.model.norm_mode = NormMode::PerNode;
          else bad_value("model.norm_mode", v, "batch or per_node");
        },
        [](const RunConfig& c) {
          return std::string(c.model.norm_mode == NormMode::Batch ? "batch" : "per_node");
        }}},
      {"model.filter_order", GTAGC_INT(model.filter_order)},
      {"model.k_pe", GTAGC_INT(model.k_pe)},
      {"model.disable_filter", GTAGC_BOOL(model.disable_filter)},
      {"model.disable_pe", GTAGC_BOOL(model.disable_pe)},
      {"model.disable_global_attention", GTAGC_BOOL(model.disable_global_attention)},
      {"model.disable_self_attention", GTAGC_BOOL(model.disable_self_attention)},

      {"train.lr", GTAGC_DOUBLE(train.lr)},
      {"train.max_epochs", GTAGC_INT(train.max_epochs)},
      {"train.patience", GTAGC_INT(train.patience)},
      {"train.alpha", GTAGC_DOUBLE(train.alpha)},
      {"train.pretrain_epochs", GTAGC_INT(train.pretrain_epochs)},
      {"train.target_update_interval", GTAGC_INT(train.target_update_interval)},
      {"train.clustering_loss",
       {[](RunConfig& c, const std::string& v) {
          const auto t = trim(v);
          if (t == "kl_self_train") c.train.clustering_loss_kind = ClusteringLossKind::KlSelfTrain;
          else if (t == "binary_ce") c.train.clustering_loss_kind = ClusteringLossKind::BinaryCe;
          else bad_value("train.clustering_loss", v, "kl_self_train or binary_ce");
        },
        [](const RunConfig& c) {
          return std::string(c.train.clustering_loss_kind == ClusteringLossKind::KlSelfTrain
                                 ? "kl_self_train"
                                 : "binary_ce");
        }}},
      {"train.kmeans_restarts", GTAGC_INT(train.kmeans_restarts)},
      {"train.eval_interval", GTAGC_INT(train.eval_interval)},

      {"run.output_dir", GTAGC_PATH(output_dir)},
      {"run.cache_dir", GTAGC_PATH(cache_dir)},
      {"run.seed", GTAGC_INT(seed)},
      {"run.runs", GTAGC_INT(runs)},
      {"run.threads", GTAGC_INT(threads)},

      {"sweep.parameter", {[](RunConfig& c, const std::string& v) { c.sweep.parameter = trim(v); },
                           [](const RunConfig& c) { return c.sweep.parameter; }}},
      {"sweep.values",
       {[](RunConfig& c, const std::string& v) {
          c.sweep.values = split_list(v);
          for (const auto& item : c.sweep.values)
            if (item.empty()) bad_value("sweep.values", v, "a comma-separated list without blank entries");
        },
        [](const RunConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.sweep.values.size(); ++i) out += (i ? "," : "") + c.sweep.values[i];
          return out;
        }}},
  };
  return table;
}

#undef GTAGC_DOUBLE
#undef GTAGC_INT
#undef GTAGC_BOOL
#undef GTAGC_PATH

std::string nearest_key(const std::string& key) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& k : config_keys()) {
    // Compare both the full dotted name and the bare key part.
    const auto bare = k.substr(k.find('.') + 1);
    const auto key_bare = key.substr(key.find('.') + 1);
    const std::size_t d = std::min(edit_distance(key, k), edit_distance(key_bare, bare) + 1);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

void validate_run_config(const RunConfig& c) {
  if (c.runs < 1) throw Error(ErrorKind::Config, "run.runs must be positive");
  if (c.threads < 1) throw Error(ErrorKind::Config, "run.threads must be positive");
  if (c.model.n_clusters != 0 && c.model.n_clusters < 2)
    throw Error(ErrorKind::Config, "model.n_clusters must be 0 (from data) or at least 2");
  ModelConfig probe = c.model;
  if (probe.n_clusters == 0) probe.n_clusters = 2;
  probe.validate();
  c.train.validate();
}

}  // namespace

std::vector<std::uint64_t> RunConfig::seeds() const {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < runs; ++i) out.push_back(seed + static_cast<std::uint64_t>(i));
  return out;
}

RunConfig default_run_config() {
  RunConfig c;
  c.model.n_clusters = 0;
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : key_table()) out.push_back(k);
    return out;
  }();
  return keys;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void set_config_value(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
  const auto& table = key_table();
  auto it = table.find(dotted_key);
  if (it == table.end())
    throw Error(ErrorKind::Config,
                "unknown key '" + dotted_key + "' (did you mean '" + nearest_key(dotted_key) + "'?)");
  it->second.set(cfg, value);
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  // Boost's INI reader only understands ';' comments.
  std::string cleaned;
  {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
      const auto t = trim(line);
      if (!t.empty() && t.front() == '#') continue;
      cleaned += line + "\n";
    }
  }
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(cleaned);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }

  RunConfig cfg = default_run_config();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw Error(ErrorKind::Config, "key '" + section + "' appears outside a section");
    for (const auto& [key, node] : body) {
      const std::string dotted = section + "." + key;
      set_config_value(cfg, dotted, node.data());
      if (key_table().at(dotted).is_path && !base_dir.empty()) {
        // Re-read the stored path and anchor it.
        const std::filesystem::path p = key_table().at(dotted).get(cfg);
        if (!p.empty() && p.is_relative()) set_config_value(cfg, dotted, (base_dir / p).lexically_normal().string());
      }
    }
  }
  validate_run_config(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

std::string format_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string current;
  for (const auto& section : {"data", "model", "train", "run", "sweep"}) {
    out << (current.empty() ? "" : "\n") << '[' << section << "]\n";
    current = section;
    for (const auto& [key, spec] : key_table()) {
      if (key.rfind(std::string(section) + ".", 0) != 0) continue;
      out << key.substr(key.find('.') + 1) << " = " << spec.get(cfg) << '\n';
    }
  }
  return out.str();
}

}  // namespace gtagc
