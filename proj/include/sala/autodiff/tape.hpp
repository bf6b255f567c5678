// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sala/autodiff/tensor.hpp"

namespace sala::ad {

/// Receives dLoss/dOutput and accumulates into the grads of the op's inputs.
using BackwardFn = std::function<void(std::span<const double> grad_out)>;

/// Define-by-run record of differentiable operations.
///
/// A tape is filled while it is active on the current thread (see TapeScope)
/// and supports exactly one backward pass. Ops evaluated with no active tape
/// are not recorded, which is how evaluation runs gradient-free.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Appends an op. `output` must have been created with requires_grad set.
  void record(const Tensor& output, std::vector<Tensor> inputs, BackwardFn backward);

  /// Propagates from a scalar loss. Gradients of leaves accumulate.
  void backward(const Tensor& loss);

  std::size_t size() const { return entries_.size(); }
  bool consumed() const { return consumed_; }
  void clear();

  /// Tape active on this thread, or nullptr.
  static Tape* active();

 private:
  friend class TapeScope;

  struct Entry {
    std::shared_ptr<TensorNode> output;
    std::vector<Tensor> inputs;  // keeps saved inputs alive
    BackwardFn backward;
  };

  std::vector<Entry> entries_;
  bool consumed_ = false;
};

/// Makes a tape active on the current thread for the scope's lifetime.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

/// True when an op over these inputs should be recorded.
bool should_record(std::initializer_list<const Tensor*> inputs);

/// Convenience: backward through the currently active tape.
void backward(const Tensor& loss);

}  // namespace sala::ad
