// SPDX-License-Identifier: Apache-2.0
#include "gtagc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "gtagc/error.hpp"

namespace gtagc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Convergence: return "ConvergenceError";
    case ErrorKind::CollapsedCluster: return "CollapsedCluster";
    case ErrorKind::Format: return "FormatError";
  }
  return "Error";
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string tok; in >> tok;) out.push_back(std::move(tok));
  return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

// Reads non-blank lines, stripping a trailing CR; yields (line number, tokens).
template <typename Fn>
void for_each_row(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_or_throw(path);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    fn(line_no, tokens);
  }
}

double parse_double(const std::string& tok, const std::filesystem::path& path,
                    std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) +
                                      ": not a number: '" + tok + "'");
  }
}

long long parse_int(const std::string& tok, const std::filesystem::path& path,
                    std::size_t line_no) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) +
                                      ": not an integer: '" + tok + "'");
  }
}

// Dense ids in first-appearance order.
template <typename Key>
Labels densify(const std::vector<Key>& raw, int& n_classes) {
  std::unordered_map<Key, int> ids;
  Labels out;
  out.reserve(raw.size());
  for (const auto& key : raw) {
    auto [it, inserted] = ids.emplace(key, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  n_classes = static_cast<int>(ids.size());
  return out;
}

struct EdgeAccumulator {
  std::set<std::pair<Index, Index>> pairs;  // (min, max)
  LoadDiagnostics* diag;

  void add(Index u, Index v) {
    if (u == v) {
      ++diag->self_loops;
      return;
    }
    if (!pairs.emplace(std::min(u, v), std::max(u, v)).second) ++diag->duplicate_edges;
  }

  SparseMatrix build(Index n) const {
    std::vector<Eigen::Triplet<double, int>> trips;
    trips.reserve(pairs.size() * 2);
    for (auto [u, v] : pairs) {
      trips.emplace_back(static_cast<int>(u), static_cast<int>(v), 1.0);
      trips.emplace_back(static_cast<int>(v), static_cast<int>(u), 1.0);
    }
    SparseMatrix adj(n, n);
    adj.setFromTriplets(trips.begin(), trips.end());
    adj.makeCompressed();
    return adj;
  }
};

}  // namespace

Index Graph::degree(Index node) const {
  return adjacency.outerIndexPtr()[node + 1] - adjacency.outerIndexPtr()[node];
}

std::size_t Graph::n_edges() const { return static_cast<std::size_t>(adjacency.nonZeros()) / 2; }

Graph load_content_cites(const DatasetSpec& spec) {
  std::vector<std::string> names;
  std::vector<std::string> raw_labels;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, Index> index_of;
  std::size_t width = 0;

  for_each_row(spec.content_path, [&](std::size_t line_no, const auto& tok) {
    if (tok.size() < 3)
      throw Error(ErrorKind::Parse, spec.content_path.string() + ":" + std::to_string(line_no) +
                                        ": expected <id> <features...> <label>, got " +
                                        std::to_string(tok.size()) + " fields");
    if (width == 0) width = tok.size();
    if (tok.size() != width)
      throw Error(ErrorKind::Parse, spec.content_path.string() + ":" + std::to_string(line_no) +
                                        ": expected " + std::to_string(width) + " fields, got " +
                                        std::to_string(tok.size()));
    if (!index_of.emplace(tok.front(), static_cast<Index>(names.size())).second)
      throw Error(ErrorKind::Parse, spec.content_path.string() + ":" + std::to_string(line_no) +
                                        ": duplicate node id '" + tok.front() + "'");
    names.push_back(tok.front());
    raw_labels.push_back(tok.back());
    std::vector<double> row;
    row.reserve(width - 2);
    for (std::size_t c = 1; c + 1 < tok.size(); ++c)
      row.push_back(parse_double(tok[c], spec.content_path, line_no));
    rows.push_back(std::move(row));
  });
  if (names.empty()) throw Error(ErrorKind::Parse, "empty graph: " + spec.content_path.string());

  const auto n = static_cast<Index>(names.size());
  const auto dim = static_cast<Index>(width - 2);
  Graph g;
  g.n_nodes = n;
  g.features.resize(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < dim; ++c) g.features(i, c) = rows[i][c];

  EdgeAccumulator edges{{}, &g.diagnostics};
  for_each_row(spec.cites_path, [&](std::size_t line_no, const auto& tok) {
    if (tok.size() != 2)
      throw Error(ErrorKind::Parse, spec.cites_path.string() + ":" + std::to_string(line_no) +
                                        ": expected 2 fields, got " + std::to_string(tok.size()));
    auto u = index_of.find(tok[0]);
    auto v = index_of.find(tok[1]);
    if (u == index_of.end() || v == index_of.end()) {
      ++g.diagnostics.dangling_edges;
      return;
    }
    edges.add(u->second, v->second);
  });
  g.adjacency = edges.build(n);

  g.labels = densify(raw_labels, g.n_classes);
  if (spec.expected_clusters > 0 && g.n_classes != spec.expected_clusters)
    g.diagnostics.class_count_mismatch = g.n_classes;
  g.names = std::move(names);
  return g;
}

Graph load_edge_list(const std::filesystem::path& edges_path,
                     const std::filesystem::path& features_path,
                     const std::filesystem::path& labels_path) {
  std::vector<std::vector<double>> rows;
  for_each_row(features_path, [&](std::size_t line_no, const auto& tok) {
    if (!rows.empty() && tok.size() != rows.front().size())
      throw Error(ErrorKind::Parse, features_path.string() + ":" + std::to_string(line_no) +
                                        ": expected " + std::to_string(rows.front().size()) +
                                        " fields, got " + std::to_string(tok.size()));
    std::vector<double> row;
    for (const auto& t : tok) row.push_back(parse_double(t, features_path, line_no));
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw Error(ErrorKind::Parse, "empty graph: " + features_path.string());
  const auto n = static_cast<Index>(rows.size());

  Graph g;
  g.n_nodes = n;
  g.features.resize(n, static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < g.features.cols(); ++c) g.features(i, c) = rows[i][c];

  EdgeAccumulator edges{{}, &g.diagnostics};
  for_each_row(edges_path, [&](std::size_t line_no, const auto& tok) {
    if (tok.size() != 2)
      throw Error(ErrorKind::Parse, edges_path.string() + ":" + std::to_string(line_no) +
                                        ": expected 2 fields, got " + std::to_string(tok.size()));
    const auto u = parse_int(tok[0], edges_path, line_no);
    const auto v = parse_int(tok[1], edges_path, line_no);
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw Error(ErrorKind::DimensionMismatch,
                  edges_path.string() + ":" + std::to_string(line_no) + ": node id out of range for " +
                      std::to_string(n) + " feature rows");
    edges.add(u, v);
  });
  g.adjacency = edges.build(n);

  if (!labels_path.empty()) {
    std::vector<long long> raw;
    for_each_row(labels_path, [&](std::size_t line_no, const auto& tok) {
      if (tok.size() != 1)
        throw Error(ErrorKind::Parse, labels_path.string() + ":" + std::to_string(line_no) +
                                          ": expected 1 field, got " + std::to_string(tok.size()));
      raw.push_back(parse_int(tok[0], labels_path, line_no));
    });
    if (static_cast<Index>(raw.size()) != n)
      throw Error(ErrorKind::DimensionMismatch, "labels file has " + std::to_string(raw.size()) +
                                                    " rows but features file has " + std::to_string(n));
    g.labels = densify(raw, g.n_classes);
  }
  g.names.reserve(n);
  for (Index i = 0; i < n; ++i) g.names.push_back(std::to_string(i));
  return g;
}

Graph make_graph(Index n_nodes, const std::vector<std::pair<Index, Index>>& edges, Matrix features,
                 std::optional<Labels> labels) {
  if (features.rows() != n_nodes)
    throw Error(ErrorKind::DimensionMismatch, "features have " + std::to_string(features.rows()) +
                                                  " rows for " + std::to_string(n_nodes) + " nodes");
  Graph g;
  g.n_nodes = n_nodes;
  EdgeAccumulator acc{{}, &g.diagnostics};
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n_nodes || v >= n_nodes)
      throw Error(ErrorKind::DimensionMismatch, "edge endpoint out of range");
    acc.add(u, v);
  }
  g.adjacency = acc.build(n_nodes);
  g.features = std::move(features);
  if (labels) {
    if (static_cast<Index>(labels->size()) != n_nodes)
      throw Error(ErrorKind::DimensionMismatch, "label count differs from node count");
    g.labels = densify(*labels, g.n_classes);
  }
  for (Index i = 0; i < n_nodes; ++i) g.names.push_back(std::to_string(i));
  return g;
}

Graph row_normalize_features(Graph g) {
  if (!g.features.allFinite())
    throw Error(ErrorKind::NonFinite, "feature matrix contains non-finite values");
  for (Index i = 0; i < g.features.rows(); ++i) {
    const double l1 = g.features.row(i).cwiseAbs().sum();
    if (l1 > 0.0) g.features.row(i) /= l1;
  }
  return g;
}

SparseMatrix mask_of(const Graph& g) {
  SparseMatrix m = g.adjacency;
  m.prune([](Index row, Index col, double) { return row != col; });
  for (Index k = 0; k < m.nonZeros(); ++k) m.valuePtr()[k] = 1.0;
  return m;
}

std::vector<std::uint8_t> canonical_bytes(const Graph& g) {
  std::vector<std::uint8_t> out;
  auto put = [&out](const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  };
  auto put_i64 = [&](std::int64_t v) { put(&v, sizeof v); };

  put_i64(g.n_nodes);
  put_i64(g.features.cols());
  put_i64(g.adjacency.nonZeros());
  for (Index r = 0; r <= g.adjacency.rows(); ++r) put_i64(g.adjacency.outerIndexPtr()[r]);
  for (Index k = 0; k < g.adjacency.nonZeros(); ++k) put_i64(g.adjacency.innerIndexPtr()[k]);
  for (Index i = 0; i < g.features.rows(); ++i)
    for (Index c = 0; c < g.features.cols(); ++c) {
      const double v = g.features(i, c);
      put(&v, sizeof v);
    }
  put_i64(g.labels ? static_cast<std::int64_t>(g.labels->size()) : -1);
  if (g.labels)
    for (int l : *g.labels) put_i64(l);
  put_i64(static_cast<std::int64_t>(g.names.size()));
  for (const auto& name : g.names) {
    put_i64(static_cast<std::int64_t>(name.size()));
    put(name.data(), name.size());
  }
  return out;
}

std::uint64_t fingerprint(const Graph& g) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint8_t b : canonical_bytes(g)) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace gtagc
