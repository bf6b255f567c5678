// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace sala::data {

std::string to_string(Partition p) {
  switch (p) {
    case Partition::train: return "train";
    case Partition::validation: return "validation";
    case Partition::test: return "test";
  }
  return "?";
}

Partition partition_from_string(const std::string& name) {
  if (name == "train") return Partition::train;
  if (name == "validation") return Partition::validation;
  if (name == "test") return Partition::test;
  throw std::invalid_argument("unknown partition '" + name + "'");
}

Dataset::Dataset(SampleShape sample_shape, std::vector<ClassData> classes)
    : sample_shape_(std::move(sample_shape)), classes_(std::move(classes)) {
  if (classes_.empty()) throw std::invalid_argument("no classes");
  if (sample_shape_.empty()) throw std::invalid_argument("sample shape must have rank >= 1");
  sample_size_ = 1;
  for (std::size_t extent : sample_shape_) {
    if (extent == 0) throw std::invalid_argument("sample shape has a zero extent");
    sample_size_ *= extent;
  }
  std::set<std::string> names;
  for (const ClassData& c : classes_) {
    if (c.name.empty() || c.name.find_first_of(" \t\r\n") != std::string::npos) {
      throw std::invalid_argument("class name '" + c.name + "' is empty or contains whitespace");
    }
    if (!names.insert(c.name).second) {
      throw std::invalid_argument("class '" + c.name + "' appears twice");
    }
    if (c.values.size() != c.labeled.size() * sample_size_) {
      throw std::invalid_argument("class '" + c.name + "' holds " + std::to_string(c.values.size()) +
                                  " values for " + std::to_string(c.labeled.size()) + " samples");
    }
    for (double v : c.values) {
      if (!std::isfinite(v)) throw std::invalid_argument("class '" + c.name + "' contains a non-finite value");
    }
  }
}

std::span<const double> Dataset::sample(std::size_t cls, std::size_t index) const {
  const ClassData& c = classes_.at(cls);
  if (index >= c.size()) throw std::out_of_range("sample index out of range in class '" + c.name + "'");
  return std::span<const double>(c.values).subspan(index * sample_size_, sample_size_);
}

std::vector<std::size_t> Dataset::classes_in(Partition p) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].partition == p) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Dataset::labeled_indices(std::size_t cls) const {
  std::vector<std::size_t> out;
  const ClassData& c = classes_.at(cls);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.labeled[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Dataset::unlabeled_indices(std::size_t cls) const {
  std::vector<std::size_t> out;
  const ClassData& c = classes_.at(cls);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c.labeled[i]) out.push_back(i);
  }
  return out;
}

Dataset Dataset::with_split(std::vector<std::vector<std::uint8_t>> labeled) const {
  if (labeled.size() != classes_.size()) throw std::invalid_argument("split covers the wrong number of classes");
  std::vector<ClassData> classes = classes_;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (labeled[i].size() != classes[i].size()) {
      throw std::invalid_argument("split for class '" + classes[i].name + "' has " +
                                  std::to_string(labeled[i].size()) + " flags for " +
                                  std::to_string(classes[i].size()) + " samples");
    }
    classes[i].labeled = std::move(labeled[i]);
  }
  return Dataset(sample_shape_, std::move(classes));
}

Dataset make_split(const Dataset& dataset, double labeled_fraction, std::uint64_t seed) {
  if (!(labeled_fraction > 0.0 && labeled_fraction < 1.0)) {
    throw std::invalid_argument("labeled fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::uint8_t>> flags;
  for (const ClassData& c : dataset.classes()) {
    const auto n_labeled = static_cast<std::size_t>(std::llround(labeled_fraction * static_cast<double>(c.size())));
    if (n_labeled == 0) {
      throw std::invalid_argument("labeled fraction " + std::to_string(labeled_fraction) +
                                  " leaves class '" + c.name + "' with no labeled samples");
    }
    std::vector<std::size_t> order(c.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::uint8_t> f(c.size(), 0);
    for (std::size_t i = 0; i < n_labeled; ++i) f[order[i]] = 1;
    flags.push_back(std::move(f));
  }
  return dataset.with_split(std::move(flags));
}

}  // namespace sala::data
