// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sala/models/parameter.hpp"

namespace sala::trainer {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  bool operator==(const AdamOptions&) const = default;
};

/// First and second moment buffers, one per parameter, plus the step count.
struct AdamState {
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update from the gradients held by `params`,
/// which are zeroed afterwards. A non-finite gradient throws before any
/// parameter is touched and names the parameter.
void adam_step(std::span<models::Parameter> params, AdamState& state, double learning_rate,
               const AdamOptions& options = {});

}  // namespace sala::trainer
