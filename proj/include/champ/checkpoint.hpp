#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "champ/mask.hpp"
#include "champ/network.hpp"

namespace champ {

inline constexpr int kCheckpointSchemaVersion = 1;

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;

  bool operator==(const TrainingMeta&) const = default;
};

/// Serialized model: versioned JSON, phase and gain arrays as base64 of
/// little-endian doubles, mask bits as base64 bytes. Phase arrays follow the
/// canonical mesh order (MZIs by (column, top_port), θ then φ, then output ψ).
struct ModelCheckpoint {
  ScIpnn net;
  std::optional<PruneMask> mask;
  TrainingMeta training;

  bool operator==(const ModelCheckpoint&) const = default;
};

std::string checkpoint_to_json(const ModelCheckpoint& ckpt);

/// Throws DataError on malformed content or array lengths that disagree with the architecture.
ModelCheckpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Writes to a temporary sibling then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

std::string base64_encode(const void* data, std::size_t size);
std::string base64_encode_doubles(const std::vector<double>& values);
std::vector<double> base64_decode_doubles(const std::string& text);

}  // namespace champ
