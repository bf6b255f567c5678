// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0
//
// On-disk dataset directory:
//   data.sdt       "SDT1" | u32 classes | per class: u32 count, u8 rank,
//                  u32 dims[rank], f64 values[count * prod(dims)]
//   labels.txt     one class name per line, in data.sdt order
//   split.sds      "SDS1" | u32 classes | per class: u32 count,
//                  ceil(count / 8) bytes, bit (i % 8) of byte i / 8 = sample i labeled
//   partition.txt  "<class_name> <train|validation|test>" per line
// All integers little-endian.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sala/data/dataset.hpp"

namespace sala::data {

inline constexpr const char* kTensorFile = "data.sdt";
inline constexpr const char* kLabelFile = "labels.txt";
inline constexpr const char* kSplitFile = "split.sds";
inline constexpr const char* kPartitionFile = "partition.txt";

std::vector<std::uint8_t> encode_tensor_file(const Dataset& dataset);
std::vector<std::uint8_t> encode_split_file(const Dataset& dataset);
std::string encode_label_file(const Dataset& dataset);
std::string encode_partition_file(const Dataset& dataset);

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace sala::data
