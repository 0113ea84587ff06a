// SPDX-License-Identifier: Apache-2.0
// Spectral cache layout (little-endian):
//   char[8]  "GTAGCSPB"
//   u32      version (1)
//   u64      graph fingerprint
//   i32      filter order, i32 k_pe
//   i64      N, i64 D, i64 nnz(L)
//   i32[N+1] L outer index, i32[nnz] L inner index, f64[nnz] L values
//   f64[N*D] smoothed features, row-major
//   f64[N*k_pe] positional encoding, row-major
//   f64[k_pe] eigenvalues
#include <cstring>
#include <fstream>

#include "gtagc/error.hpp"
#include "gtagc/spectral.hpp"

namespace gtagc {

namespace {

constexpr char kMagic[8] = {'G', 'T', 'A', 'G', 'C', 'S', 'P', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(ErrorKind::Format, "truncated spectral cache");
  return v;
}

void write_rows(std::ofstream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index c = 0; c < m.cols(); ++c) write_pod(out, m(i, c));
}

Matrix read_rows(std::ifstream& in, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) m(i, c) = read_pod<double>(in);
  return m;
}

}  // namespace

void save_spectral_bundle(const std::filesystem::path& path, const SpectralBundle& b,
                          std::uint64_t graph_fingerprint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_pod(out, kVersion);
  write_pod(out, graph_fingerprint);
  write_pod(out, static_cast<std::int32_t>(b.filter_order));
  write_pod(out, static_cast<std::int32_t>(b.k_pe));
  const Index n = b.laplacian.rows();
  write_pod(out, static_cast<std::int64_t>(n));
  write_pod(out, static_cast<std::int64_t>(b.smoothed_features.cols()));
  write_pod(out, static_cast<std::int64_t>(b.laplacian.nonZeros()));
  for (Index i = 0; i <= n; ++i) write_pod(out, static_cast<std::int32_t>(b.laplacian.outerIndexPtr()[i]));
  for (Index k = 0; k < b.laplacian.nonZeros(); ++k)
    write_pod(out, static_cast<std::int32_t>(b.laplacian.innerIndexPtr()[k]));
  for (Index k = 0; k < b.laplacian.nonZeros(); ++k) write_pod(out, b.laplacian.valuePtr()[k]);
  write_rows(out, b.smoothed_features);
  write_rows(out, b.pos_encoding);
  for (Index k = 0; k < b.pe_eigenvalues.size(); ++k) write_pod(out, b.pe_eigenvalues[k]);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

std::optional<SpectralBundle> load_spectral_bundle(const std::filesystem::path& path,
                                                   std::uint64_t graph_fingerprint,
                                                   int filter_order, int k_pe) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error(ErrorKind::Format, path.string() + ": not a spectral cache");
  if (read_pod<std::uint32_t>(in) != kVersion)
    throw Error(ErrorKind::Format, path.string() + ": unsupported cache version");
  if (read_pod<std::uint64_t>(in) != graph_fingerprint) return std::nullopt;
  if (read_pod<std::int32_t>(in) != filter_order) return std::nullopt;
  if (read_pod<std::int32_t>(in) != k_pe) return std::nullopt;

  const auto n = read_pod<std::int64_t>(in);
  const auto d = read_pod<std::int64_t>(in);
  const auto nnz = read_pod<std::int64_t>(in);
  if (n < 0 || d < 0 || nnz < 0) throw Error(ErrorKind::Format, "negative size in spectral cache");

  SpectralBundle b;
  b.filter_order = filter_order;
  b.k_pe = k_pe;
  std::vector<int> outer(static_cast<std::size_t>(n + 1));
  std::vector<int> inner(static_cast<std::size_t>(nnz));
  std::vector<double> values(static_cast<std::size_t>(nnz));
  for (auto& v : outer) v = read_pod<std::int32_t>(in);
  for (auto& v : inner) v = read_pod<std::int32_t>(in);
  for (auto& v : values) v = read_pod<double>(in);
  b.laplacian = Eigen::Map<const SparseMatrix>(n, n, nnz, outer.data(), inner.data(), values.data());
  b.smoothed_features = read_rows(in, n, d);
  b.pos_encoding = read_rows(in, n, k_pe);
  b.pe_eigenvalues.resize(k_pe);
  for (int k = 0; k < k_pe; ++k) b.pe_eigenvalues[k] = read_pod<double>(in);
  return b;
}

}  // namespace gtagc
