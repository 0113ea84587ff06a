// SPDX-License-Identifier: Apache-2.0
// Small graphs and helpers shared by the unit tests.
#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "gtagc/graph.hpp"

namespace gtagc::test {

inline Graph path3() {
  return make_graph(3, {{0, 1}, {1, 2}}, Matrix::Identity(3, 3), Labels{0, 0, 1});
}

inline Graph triangle() {
  return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, Matrix::Identity(3, 3));
}

// Two K10 cliques joined by one bridge edge, blob-indicator features with
// a little seeded noise.
inline Graph two_cliques(std::uint64_t seed = 0) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index c = 0; c < 2; ++c)
    for (Index i = 0; i < 10; ++i)
      for (Index j = i + 1; j < 10; ++j) edges.emplace_back(c * 10 + i, c * 10 + j);
  edges.emplace_back(0, 10);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.0, 0.2);
  Matrix x(20, 6);
  Labels y(20);
  for (Index i = 0; i < 20; ++i) {
    const int c = static_cast<int>(i / 10);
    y[static_cast<std::size_t>(i)] = c;
    for (Index k = 0; k < 6; ++k) x(i, k) = (k % 2 == c ? 1.0 : 0.0) + noise(rng);
  }
  return row_normalize_features(make_graph(20, edges, x, y));
}

// Erdos-Renyi style graph with edge probability p and Gaussian features.
inline Graph random_graph(Index n, Index d, double p, std::uint64_t seed, int n_classes = 2) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(p);
  std::normal_distribution<double> gauss;
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (edge(rng)) edges.emplace_back(i, j);
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) x(i, k) = gauss(rng);
  Labels y(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<int>(i % n_classes);
  return make_graph(n, edges, x, y);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gtagc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double denom = std::max(b.norm(), 1e-12);
  return (a - b).norm() / denom;
}

}  // namespace gtagc::test
