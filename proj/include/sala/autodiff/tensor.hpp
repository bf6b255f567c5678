// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sala::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Storage shared by every handle to one tensor.
struct TensorNode {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // same size as data iff requires_grad
  bool requires_grad = false;
  std::uint64_t id = 0;
};

/// Dense row-major f64 tensor. Copies are shallow handles onto the same node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  std::uint64_t id() const;

  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return data().size(); }

  std::span<const double> data() const;
  std::span<double> mutable_data();
  double at(std::size_t flat) const { return data()[flat]; }
  double item() const;

  bool requires_grad() const;
  std::span<const double> grad() const;
  /// Grad buffer of the shared node; handles are shallow so this is const.
  std::span<double> mutable_grad() const;
  void zero_grad();

  /// Deep copy of data into a fresh leaf (no grad history).
  Tensor detach(bool requires_grad = false) const;

  const std::shared_ptr<TensorNode>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<TensorNode> node_;
};

}  // namespace sala::ad
