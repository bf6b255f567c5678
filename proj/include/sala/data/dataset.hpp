// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sala::data {

using SampleShape = std::vector<std::size_t>;

enum class Partition { train, validation, test };

std::string to_string(Partition p);
Partition partition_from_string(const std::string& name);

struct ClassData {
  std::string name;
  Partition partition = Partition::train;
  std::vector<double> values;         // samples back to back, each sample_size long
  std::vector<std::uint8_t> labeled;  // one flag per sample

  std::size_t size() const { return labeled.size(); }
};

/// Immutable collection of fixed-shape f64 samples grouped by class.
///
/// Every class belongs to exactly one partition and class names are unique,
/// so train/validation/test classes never overlap.
class Dataset {
 public:
  Dataset(SampleShape sample_shape, std::vector<ClassData> classes);

  const SampleShape& sample_shape() const { return sample_shape_; }
  std::size_t sample_size() const { return sample_size_; }
  std::size_t class_count() const { return classes_.size(); }
  const ClassData& cls(std::size_t index) const { return classes_.at(index); }
  const std::vector<ClassData>& classes() const { return classes_; }

  std::span<const double> sample(std::size_t cls, std::size_t index) const;

  std::vector<std::size_t> classes_in(Partition p) const;
  std::vector<std::size_t> labeled_indices(std::size_t cls) const;
  std::vector<std::size_t> unlabeled_indices(std::size_t cls) const;

  /// Same samples and partitions with replaced labeled flags.
  Dataset with_split(std::vector<std::vector<std::uint8_t>> labeled) const;

 private:
  SampleShape sample_shape_;
  std::size_t sample_size_ = 0;
  std::vector<ClassData> classes_;
};

/// Marks round(fraction * n) samples of each class as labeled, chosen uniformly
/// at random; deterministic given the seed.
Dataset make_split(const Dataset& dataset, double labeled_fraction, std::uint64_t seed);

}  // namespace sala::data
