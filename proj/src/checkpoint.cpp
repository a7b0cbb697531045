//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cliffkit/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

namespace cliffkit {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are written with native little-endian stores");

namespace {

using Kind = CheckpointError::Kind;

nlohmann::json config_json(const ModelConfig &c) {
  return {{"hidden_dim", c.hidden_dim},
          {"message_layers", c.message_layers},
          {"atom_feature_width", c.atom_feature_width},
          {"bond_feature_width", c.bond_feature_width},
          {"aggregation", "mean"}};
}

ModelConfig config_from_json(const nlohmann::json &j) {
  ModelConfig c;
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.message_layers = j.at("message_layers").get<std::size_t>();
  c.atom_feature_width = j.at("atom_feature_width").get<std::size_t>();
  c.bond_feature_width = j.at("bond_feature_width").get<std::size_t>();
  if (j.at("aggregation").get<std::string>() != "mean")
    throw CheckpointError(Kind::Shape, "unsupported aggregation");
  return c;
}

void append_doubles(std::string &out, std::span<const double> values) {
  const std::size_t offset = out.size();
  out.resize(offset + values.size() * sizeof(double));
  std::memcpy(out.data() + offset, values.data(), values.size() * sizeof(double));
}

class Reader {
public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n, const char *what) {
    if (bytes_.size() - pos_ < n)
      throw CheckpointError(Kind::Truncated,
                            std::string("checkpoint truncated while reading ") + what);
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void read_doubles(std::span<double> out, const char *what) {
    std::string_view raw = take(out.size() * sizeof(double), what);
    std::memcpy(out.data(), raw.data(), raw.size());
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

} // namespace

std::string serialize_checkpoint(const MpnnModel &model,
                                 const nlohmann::json &metadata) {
  nlohmann::json header;
  header["schema"] = kCheckpointSchema;
  header["config"] = config_json(model.config);
  nlohmann::json params = nlohmann::json::array();
  for (const ad::Parameter &p : model.parameters)
    params.push_back({{"name", p.name},
                      {"group", ad::group_tag_name(p.group)},
                      {"shape", p.value.shape()}});
  header["parameters"] = params;
  nlohmann::json running = nlohmann::json::array();
  for (const ad::RunningStats &r : model.running)
    running.push_back({{"initialized", r.initialized}, {"size", r.mean.size()}});
  header["running_stats"] = running;
  header["metadata"] = metadata;

  const std::string text = header.dump();
  if (text.size() > UINT32_MAX)
    throw CheckpointError(Kind::Format, "checkpoint header too large");
  std::string out(kCheckpointMagic);
  const auto length = static_cast<std::uint32_t>(text.size());
  for (int b = 0; b < 4; ++b)
    out.push_back(static_cast<char>((length >> (8 * b)) & 0xFFu));
  out += text;
  for (const ad::Parameter &p : model.parameters)
    append_doubles(out, p.value.values());
  for (const ad::RunningStats &r : model.running) {
    append_doubles(out, r.mean.values());
    append_doubles(out, r.var.values());
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  if (bytes.size() < kCheckpointMagic.size() ||
      bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
    throw CheckpointError(Kind::Version, "not an mpnn checkpoint (bad magic)");
  in.take(kCheckpointMagic.size(), "magic");
  std::string_view len = in.take(4, "header length");
  std::uint32_t length = 0;
  for (int b = 0; b < 4; ++b)
    length |= static_cast<std::uint32_t>(static_cast<unsigned char>(len[b])) << (8 * b);
  std::string_view text = in.take(length, "header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError(Kind::Format, std::string("bad checkpoint header: ") + e.what());
  }
  const std::string schema = header.value("schema", "");
  if (schema != kCheckpointSchema)
    throw CheckpointError(Kind::Version, "unsupported checkpoint schema '" +
                                             schema + "' (expected " +
                                             std::string(kCheckpointSchema) + ")");

  Checkpoint ck;
  try {
    const ModelConfig config = config_from_json(header.at("config"));
    try {
      ck.model = zero_model(config);
    } catch (const std::invalid_argument &e) {
      throw CheckpointError(Kind::Shape, std::string("bad embedded config: ") + e.what());
    }
    const nlohmann::json &params = header.at("parameters");
    if (params.size() != ck.model.parameters.size())
      throw CheckpointError(Kind::Shape, "parameter count does not match config");
    for (std::size_t i = 0; i < params.size(); ++i) {
      const ad::Parameter &p = ck.model.parameters[i];
      if (params[i].at("name").get<std::string>() != p.name ||
          params[i].at("group").get<std::string>() != ad::group_tag_name(p.group) ||
          params[i].at("shape").get<ad::Shape>() != p.value.shape())
        throw CheckpointError(Kind::Shape,
                              "parameter " + std::to_string(i) + " ('" +
                                  params[i].at("name").get<std::string>() +
                                  "') does not match the embedded config");
    }
    const nlohmann::json &running = header.at("running_stats");
    if (running.size() != ck.model.running.size())
      throw CheckpointError(Kind::Shape, "running stats do not match config");
    for (std::size_t l = 0; l < running.size(); ++l) {
      if (running[l].at("size").get<std::size_t>() != config.hidden_dim)
        throw CheckpointError(Kind::Shape, "running stats do not match config");
      ck.model.running[l].initialized = running[l].at("initialized").get<bool>();
    }
    ck.metadata = header.value("metadata", nlohmann::json::object());
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError(Kind::Format, std::string("bad checkpoint header: ") + e.what());
  }

  for (ad::Parameter &p : ck.model.parameters)
    in.read_doubles(p.value.values(), "parameters");
  for (ad::RunningStats &r : ck.model.running) {
    in.read_doubles(r.mean.values(), "running stats");
    in.read_doubles(r.var.values(), "running stats");
  }
  if (in.remaining() != 0)
    throw CheckpointError(Kind::Format, std::to_string(in.remaining()) +
                                            " trailing bytes after checkpoint payload");
  return ck;
}

void save_checkpoint(const MpnnModel &model, const std::filesystem::path &path,
                     const nlohmann::json &metadata) {
  write_file(path, serialize_checkpoint(model, metadata));
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  return deserialize_checkpoint(read_file(path));
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &size, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * size);
  for (unsigned int i = 0; i < size; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string file_sha256(const std::filesystem::path &path) {
  return sha256_hex(read_file(path));
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path &path, std::string_view bytes) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

} // namespace cliffkit
