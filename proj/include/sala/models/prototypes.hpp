// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "sala/autodiff/tensor.hpp"

namespace sala::models {

/// Class centers in embedding space, one row per episode class.
struct PrototypeSet {
  ad::Tensor centers;          // [N x d]
  std::vector<double> counts;  // effective mass per class
};

/// One-hot class-indicator matrix [labels.size() x n_classes].
ad::Tensor indicator_matrix(std::span<const std::size_t> labels, std::size_t n_classes);

/// Class means of labeled embeddings [NK x d]. Every class in [0, n_classes)
/// needs at least one sample.
PrototypeSet compute_prototypes(const ad::Tensor& embeddings, std::span<const std::size_t> labels,
                                std::size_t n_classes);

}  // namespace sala::models
