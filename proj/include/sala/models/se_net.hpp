// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <vector>

#include "sala/autodiff/tensor.hpp"
#include "sala/models/parameter.hpp"
#include "sala/models/prototypes.hpp"

namespace sala::models {

/// Per-class, per-dimension metric weights alpha, [N x d], every entry in (0, 1).
struct TaskWeights {
  ad::Tensor alpha;
};

/// Squeeze-and-excitation bottleneck: dense d -> d/r, relu, dense d/r -> d, sigmoid.
/// Only the two dense layers carry parameters.
class SENet {
 public:
  SENet(std::size_t dim, std::size_t reduction_ratio, std::mt19937_64& rng);

  std::size_t dim() const { return dim_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t reduction_ratio() const { return reduction_ratio_; }

  /// Applies the bottleneck to each row of `x` [N x d] with shared weights.
  ad::Tensor forward(const ad::Tensor& x) const;

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }

 private:
  std::size_t dim_;
  std::size_t reduction_ratio_;
  std::size_t hidden_;
  std::vector<Parameter> params_;  // reduce.weight, reduce.bias, expand.weight, expand.bias
};

/// Hidden width of the SE bottleneck: max(1, floor(d / r)).
std::size_t se_hidden_width(std::size_t dim, std::size_t reduction_ratio);

/// Each prototype row goes through the shared SE network independently.
TaskWeights generate_task_weights(const SENet& se, const PrototypeSet& prototypes);

}  // namespace sala::models
