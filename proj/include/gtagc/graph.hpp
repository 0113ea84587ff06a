// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gtagc/types.hpp"

namespace gtagc {

/// Counters for input rows that were repaired or discarded while loading.
struct LoadDiagnostics {
  std::size_t dangling_edges = 0;    // endpoint id not present in the node table
  std::size_t self_loops = 0;
  std::size_t duplicate_edges = 0;   // repeated (u,v) rows, either direction
  std::optional<int> class_count_mismatch;  // classes found, when != expected
};

/// Attributed, undirected, unweighted graph.
///
/// `adjacency` is symmetric with unit entries and never stores (i,i).
/// `labels`, when present, are dense class ids in [0, n_classes) with every
/// class occupied.
struct Graph {
  Index n_nodes = 0;
  SparseMatrix adjacency;
  Matrix features;
  std::optional<Labels> labels;
  int n_classes = 0;
  std::vector<std::string> names;
  LoadDiagnostics diagnostics;

  Index feature_dim() const { return features.cols(); }
  Index degree(Index node) const;
  std::size_t n_edges() const;  // undirected edge count
};

struct DatasetSpec {
  std::filesystem::path content_path;
  std::filesystem::path cites_path;
  int expected_clusters = 0;
};

/// Reads a `<id> <f_1..f_D> <label>` content file and a `<citing> <cited>`
/// cites file. Class labels are assigned dense ids in first-appearance order.
Graph load_content_cites(const DatasetSpec& spec);

/// Reads integer edge pairs, an N x D feature table and one label per row.
/// `labels_path` may be empty for unlabelled graphs.
Graph load_edge_list(const std::filesystem::path& edges_path,
                     const std::filesystem::path& features_path,
                     const std::filesystem::path& labels_path);

/// Builds a graph from in-memory parts, applying the same symmetrisation
/// and self-loop rules as the file loaders.
Graph make_graph(Index n_nodes, const std::vector<std::pair<Index, Index>>& edges,
                 Matrix features, std::optional<Labels> labels = std::nullopt);

/// Divides each row with positive L1 norm by that norm; zero rows are kept.
Graph row_normalize_features(Graph g);

/// Binary edge mask with a zero diagonal.
SparseMatrix mask_of(const Graph& g);

/// Stable byte serialisation of the graph payload (diagnostics excluded).
std::vector<std::uint8_t> canonical_bytes(const Graph& g);

/// 64-bit FNV-1a over canonical_bytes; used to key spectral caches.
std::uint64_t fingerprint(const Graph& g);

}  // namespace gtagc
