// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sala/models/parameter.hpp"

namespace sala::models {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, all integers little-endian:
///   "SALA" | u32 version | u32 len, config echo bytes | u32 array count |
///   per array: u32 name len, name | u8 rank | u32 dims[rank] | f64 data
struct Checkpoint {
  std::string config_echo;
  std::vector<NamedArray> arrays;

  bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& source = "checkpoint");

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// 64-bit FNV-1a digest, rendered as 16 hex digits.
std::string content_hash(std::span<const std::uint8_t> bytes);

}  // namespace sala::models
