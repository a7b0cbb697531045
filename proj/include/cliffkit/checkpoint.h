//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CLIFFKIT_CHECKPOINT_H_
#define CLIFFKIT_CHECKPOINT_H_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cliffkit/model.h"

namespace cliffkit {

inline constexpr std::string_view kCheckpointMagic = "MPNNCKPT";
inline constexpr std::string_view kCheckpointSchema = "mpnn-ckpt/1";

class CheckpointError : public std::runtime_error {
public:
  enum class Kind { Version, Truncated, Shape, Format };

  CheckpointError(Kind kind, const std::string &msg)
      : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

struct Checkpoint {
  MpnnModel model;
  // Free-form provenance (loss and training settings, split seed, ...).
  nlohmann::json metadata = nlohmann::json::object();
};

/// Layout: magic "MPNNCKPT" | u32 LE header length | header JSON | float64 LE
/// payload of every parameter in storage order | running mean and variance
/// of each batchnorm layer. See docs/formats.md.
std::string serialize_checkpoint(const MpnnModel &model,
                                 const nlohmann::json &metadata = nlohmann::json::object());
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const MpnnModel &model, const std::filesystem::path &path,
                     const nlohmann::json &metadata = nlohmann::json::object());
Checkpoint load_checkpoint(const std::filesystem::path &path);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path &path);

std::string read_file(const std::filesystem::path &path);
// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path &path, std::string_view bytes);

} // namespace cliffkit

#endif // CLIFFKIT_CHECKPOINT_H_
