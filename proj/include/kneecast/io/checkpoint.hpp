#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "kneecast/model/model.hpp"

namespace kneecast::io {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout (all integers little-endian):
///   "KNEECAST" | u32 version | u64 n | header JSON (n bytes)
///   | u64 m | manifest JSON (m bytes) | u64 k | k float64 values | u32 CRC-32
/// The CRC covers every preceding byte. The manifest lists
/// {name, group, shape, offset, count} with offsets in float64 units.
std::string serialize_checkpoint(const model::Model& model);

/// Throws DataError("upgrade") on a version mismatch and
/// DataError("corruption") on truncation, checksum or manifest failures.
model::Model deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const model::Model& model, const std::filesystem::path& path);
model::Model load_checkpoint(const std::filesystem::path& path);

/// Architecture descriptor: scenario plus every ModelHyper field.
std::string architecture_json(const model::Model& model);

}  // namespace kneecast::io
