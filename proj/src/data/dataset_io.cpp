// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/data/dataset_io.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

#include "sala/util/binary_io.hpp"

namespace sala::data {

namespace fs = std::filesystem;

std::vector<std::uint8_t> encode_tensor_file(const Dataset& dataset) {
  io::ByteWriter w;
  w.bytes("SDT1");
  w.u32(static_cast<std::uint32_t>(dataset.class_count()));
  for (const ClassData& c : dataset.classes()) {
    w.u32(static_cast<std::uint32_t>(c.size()));
    w.u8(static_cast<std::uint8_t>(dataset.sample_shape().size()));
    for (std::size_t extent : dataset.sample_shape()) w.u32(static_cast<std::uint32_t>(extent));
    for (double v : c.values) w.f64(v);
  }
  return w.take();
}

std::vector<std::uint8_t> encode_split_file(const Dataset& dataset) {
  io::ByteWriter w;
  w.bytes("SDS1");
  w.u32(static_cast<std::uint32_t>(dataset.class_count()));
  for (const ClassData& c : dataset.classes()) {
    w.u32(static_cast<std::uint32_t>(c.size()));
    std::vector<std::uint8_t> bits((c.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.labeled[i]) bits[i / 8] = static_cast<std::uint8_t>(bits[i / 8] | (1u << (i % 8)));
    }
    for (std::uint8_t b : bits) w.u8(b);
  }
  return w.take();
}

std::string encode_label_file(const Dataset& dataset) {
  std::string out;
  for (const ClassData& c : dataset.classes()) out += c.name + "\n";
  return out;
}

std::string encode_partition_file(const Dataset& dataset) {
  std::string out;
  for (const ClassData& c : dataset.classes()) out += c.name + " " + to_string(c.partition) + "\n";
  return out;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  io::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::string> read_lines(const fs::path& path) {
  auto bytes = io::read_file(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

[[noreturn]] void text_error(const fs::path& path, std::size_t line, const std::string& what) {
  throw io::FormatError(path.string() + " line " + std::to_string(line) + ": " + what);
}

}  // namespace

void save_dataset(const fs::path& dir, const Dataset& dataset) {
  fs::create_directories(dir);
  io::write_file(dir / kTensorFile, encode_tensor_file(dataset));
  io::write_file(dir / kSplitFile, encode_split_file(dataset));
  write_text(dir / kLabelFile, encode_label_file(dataset));
  write_text(dir / kPartitionFile, encode_partition_file(dataset));
}

Dataset load_dataset(const fs::path& dir) {
  const fs::path tensor_path = dir / kTensorFile;
  auto tensor_bytes = io::read_file(tensor_path);
  io::ByteReader r(tensor_bytes, tensor_path.string());
  if (r.bytes(4) != "SDT1") r.fail("bad magic, expected \"SDT1\"");
  const std::uint32_t n_classes = r.u32();
  if (n_classes == 0) r.fail("no classes");

  SampleShape shape;
  std::vector<ClassData> classes(n_classes);
  for (std::uint32_t c = 0; c < n_classes; ++c) {
    const std::uint32_t count = r.u32();
    const std::uint8_t rank = r.u8();
    if (rank == 0) r.fail("class " + std::to_string(c) + " has rank 0");
    SampleShape s;
    for (std::uint8_t k = 0; k < rank; ++k) s.push_back(r.u32());
    if (c == 0) {
      shape = s;
    } else if (s != shape) {
      r.fail("class " + std::to_string(c) + " sample shape differs from class 0");
    }
    std::size_t size = 1;
    for (std::size_t e : s) size *= e;
    if (size == 0) r.fail("class " + std::to_string(c) + " has a zero extent");
    classes[c].values.resize(static_cast<std::size_t>(count) * size);
    for (double& v : classes[c].values) v = r.f64();
    classes[c].labeled.assign(count, 1);
  }
  if (!r.at_end()) r.fail("trailing bytes after last class");

  const fs::path label_path = dir / kLabelFile;
  auto names = read_lines(label_path);
  if (names.size() != n_classes) {
    text_error(label_path, names.size(), std::to_string(names.size()) + " names for " + std::to_string(n_classes) +
                                             " classes in " + kTensorFile);
  }
  std::map<std::string, std::size_t> index_of;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (!index_of.emplace(names[c], c).second) text_error(label_path, c + 1, "duplicate class '" + names[c] + "'");
    classes[c].name = names[c];
  }

  const fs::path split_path = dir / kSplitFile;
  auto split_bytes = io::read_file(split_path);
  io::ByteReader sr(split_bytes, split_path.string());
  if (sr.bytes(4) != "SDS1") sr.fail("bad magic, expected \"SDS1\"");
  if (sr.u32() != n_classes) sr.fail("class count differs from " + std::string(kTensorFile));
  for (std::uint32_t c = 0; c < n_classes; ++c) {
    const std::uint32_t count = sr.u32();
    if (count != classes[c].size()) {
      sr.fail("class " + std::to_string(c) + " has " + std::to_string(count) + " flags for " +
              std::to_string(classes[c].size()) + " samples");
    }
    const std::string bits = sr.bytes((count + 7) / 8);
    for (std::size_t i = 0; i < count; ++i) {
      classes[c].labeled[i] = static_cast<std::uint8_t>((static_cast<unsigned char>(bits[i / 8]) >> (i % 8)) & 1u);
    }
  }
  if (!sr.at_end()) sr.fail("trailing bytes after last class");

  const fs::path partition_path = dir / kPartitionFile;
  auto lines = read_lines(partition_path);
  std::vector<bool> assigned(n_classes, false);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::istringstream ls(lines[i]);
    std::string name, part, extra;
    if (!(ls >> name >> part) || (ls >> extra)) text_error(partition_path, i + 1, "expected '<class> <partition>'");
    auto it = index_of.find(name);
    if (it == index_of.end()) text_error(partition_path, i + 1, "unknown class '" + name + "'");
    if (assigned[it->second]) text_error(partition_path, i + 1, "class '" + name + "' is in overlapping partitions");
    try {
      classes[it->second].partition = partition_from_string(part);
    } catch (const std::invalid_argument& e) {
      text_error(partition_path, i + 1, e.what());
    }
    assigned[it->second] = true;
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (!assigned[c]) text_error(partition_path, lines.size(), "class '" + names[c] + "' has no partition");
  }
  return Dataset(std::move(shape), std::move(classes));
}

}  // namespace sala::data
