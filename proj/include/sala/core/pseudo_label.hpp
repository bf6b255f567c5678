// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "sala/autodiff/tensor.hpp"
#include "sala/core/run_mode.hpp"
#include "sala/models/prototypes.hpp"
#include "sala/models/se_net.hpp"

namespace sala::core {

/// Soft and hard pseudo labels of the unlabeled set.
struct PseudoLabelTable {
  ad::Tensor distances;      // [M x N], differentiable
  ad::Tensor probabilities;  // [M x N], rows sum to 1, differentiable
  std::vector<double> best_distance;    // d*(u)
  std::vector<std::size_t> best_class;  // argmin, lowest index on ties

  std::size_t size() const { return best_class.size(); }
};

/// Distances use the task weights when mode.use_task_metric, plain squared
/// Euclidean otherwise.
PseudoLabelTable pseudo_label(const models::PrototypeSet& prototypes, const models::TaskWeights* weights,
                              const ad::Tensor& unlabeled_embeddings, const RunMode& mode);

/// Indices of the n samples with the smallest d*, ranked; ties keep sample order.
std::vector<std::size_t> select_top_n(const PseudoLabelTable& table, std::size_t n);

/// One soft refinement step over the support set plus the selected unlabeled
/// samples weighted by their class probabilities.
models::PrototypeSet refine_prototypes(const ad::Tensor& support_embeddings, std::span<const std::size_t> labels,
                                       std::size_t n_classes, const PseudoLabelTable& table,
                                       std::span<const std::size_t> selected, const ad::Tensor& unlabeled_embeddings);

}  // namespace sala::core
