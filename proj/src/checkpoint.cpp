// SPDX-License-Identifier: Apache-2.0
// Checkpoint layout (little-endian), documented in docs/formats.md:
//   char[8] "GTAGCCKP", u32 version (1)
//   u64 length + UTF-8 JSON object with the ModelConfig and input_dim
//   u32 tensor count, then per tensor:
//     u32 name length, name bytes, i64 rows, i64 cols, f64[rows*cols] row-major
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "gtagc/error.hpp"
#include "gtagc/model.hpp"

namespace gtagc {

namespace {

constexpr char kMagic[8] = {'G', 'T', 'A', 'G', 'C', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

nlohmann::json config_to_json(const ModelConfig& c, Index input_dim) {
  return {
      {"hidden_dims", c.hidden_dims},
      {"gamma", c.gamma},
      {"leaky_slope", c.leaky_slope},
      {"n_clusters", c.n_clusters},
      {"dropout", c.dropout},
      {"ffn_multiplier", c.ffn_multiplier},
      {"norm_mode", c.norm_mode == NormMode::Batch ? "batch" : "per_node"},
      {"filter_order", c.filter_order},
      {"k_pe", c.k_pe},
      {"disable_filter", c.disable_filter},
      {"disable_pe", c.disable_pe},
      {"disable_global_attention", c.disable_global_attention},
      {"disable_self_attention", c.disable_self_attention},
      {"input_dim", input_dim},
  };
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
  c.gamma = j.at("gamma").get<double>();
  c.leaky_slope = j.at("leaky_slope").get<double>();
  c.n_clusters = j.at("n_clusters").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.ffn_multiplier = j.at("ffn_multiplier").get<int>();
  c.norm_mode = j.at("norm_mode").get<std::string>() == "batch" ? NormMode::Batch : NormMode::PerNode;
  c.filter_order = j.at("filter_order").get<int>();
  c.k_pe = j.at("k_pe").get<int>();
  c.disable_filter = j.at("disable_filter").get<bool>();
  c.disable_pe = j.at("disable_pe").get<bool>();
  c.disable_global_attention = j.at("disable_global_attention").get<bool>();
  c.disable_self_attention = j.at("disable_self_attention").get<bool>();
  return c;
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(ErrorKind::Format, path.string() + ": truncated checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_pod(out, kVersion);
  const std::string header = config_to_json(ckpt.config, ckpt.input_dim).dump();
  write_pod(out, static_cast<std::uint64_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::uint32_t count = 0;
  ckpt.params.for_each([&count](const std::string&, const Matrix&) { ++count; });
  write_pod(out, count);
  ckpt.params.for_each([&out](const std::string& name, const Matrix& t) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod(out, static_cast<std::int64_t>(t.rows()));
    write_pod(out, static_cast<std::int64_t>(t.cols()));
    for (Index i = 0; i < t.rows(); ++i)
      for (Index j = 0; j < t.cols(); ++j) write_pod(out, t(i, j));
  });
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error(ErrorKind::Format, path.string() + ": not a checkpoint");
  if (read_pod<std::uint32_t>(in, path) != kVersion)
    throw Error(ErrorKind::Format, path.string() + ": unsupported checkpoint version");

  const auto header_len = read_pod<std::uint64_t>(in, path);
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw Error(ErrorKind::Format, path.string() + ": truncated checkpoint header");

  Checkpoint ckpt;
  try {
    const auto j = nlohmann::json::parse(header);
    ckpt.config = config_from_json(j);
    ckpt.input_dim = j.at("input_dim").get<Index>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, path.string() + ": bad checkpoint header: " + e.what());
  }

  std::map<std::string, Matrix> tensors;
  const auto count = read_pod<std::uint32_t>(in, path);
  for (std::uint32_t n = 0; n < count; ++n) {
    const auto len = read_pod<std::uint32_t>(in, path);
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto rows = read_pod<std::int64_t>(in, path);
    const auto cols = read_pod<std::int64_t>(in, path);
    if (rows < 0 || cols < 0) throw Error(ErrorKind::Format, path.string() + ": negative tensor shape");
    Matrix t(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) t(i, j) = read_pod<double>(in, path);
    tensors.emplace(std::move(name), std::move(t));
  }

  ckpt.params = init_encoder_params(ckpt.config, ckpt.input_dim, 0);
  ckpt.params.for_each([&](const std::string& name, Matrix& t) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw Error(ErrorKind::Format, path.string() + ": missing tensor " + name);
    if (it->second.rows() != t.rows() || it->second.cols() != t.cols())
      throw Error(ErrorKind::Format, path.string() + ": tensor " + name + " has shape " +
                                         std::to_string(it->second.rows()) + "x" +
                                         std::to_string(it->second.cols()) + ", expected " +
                                         std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
    t = it->second;
  });
  return ckpt;
}

}  // namespace gtagc
