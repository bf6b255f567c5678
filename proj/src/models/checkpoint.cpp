// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/models/checkpoint.hpp"

#include <cstdio>

#include "sala/util/binary_io.hpp"

namespace sala::models {

namespace {
constexpr std::string_view kMagic = "SALA";
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint) {
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(checkpoint.config_echo.size()));
  w.bytes(checkpoint.config_echo);
  w.u32(static_cast<std::uint32_t>(checkpoint.arrays.size()));
  for (const NamedArray& a : checkpoint.arrays) {
    w.u32(static_cast<std::uint32_t>(a.name.size()));
    w.bytes(a.name);
    w.u8(static_cast<std::uint8_t>(a.shape.size()));
    for (std::size_t extent : a.shape) w.u32(static_cast<std::uint32_t>(extent));
    for (double v : a.values) w.f64(v);
  }
  return w.take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& source) {
  io::ByteReader r(bytes, source);
  if (r.bytes(4) != kMagic) r.fail("bad magic, expected \"SALA\"");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) r.fail("unsupported checkpoint version " + std::to_string(version));
  Checkpoint out;
  out.config_echo = r.bytes(r.u32());
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedArray a;
    a.name = r.bytes(r.u32());
    const std::uint8_t rank = r.u8();
    if (rank == 0) r.fail("array '" + a.name + "' has rank 0");
    std::size_t n = 1;
    for (std::uint8_t k = 0; k < rank; ++k) {
      const std::uint32_t extent = r.u32();
      if (extent == 0) r.fail("array '" + a.name + "' has a zero extent");
      a.shape.push_back(extent);
      n *= extent;
    }
    a.values.resize(n);
    for (double& v : a.values) v = r.f64();
    out.arrays.push_back(std::move(a));
  }
  if (!r.at_end()) r.fail("trailing bytes after last array");
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  io::write_file(path, encode_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(io::read_file(path), path.string());
}

std::string content_hash(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sala::models
