// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/core/pseudo_label.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sala/autodiff/ops.hpp"
#include "sala/core/metric.hpp"

namespace sala::core {

PseudoLabelTable pseudo_label(const models::PrototypeSet& prototypes, const models::TaskWeights* weights,
                              const ad::Tensor& unlabeled_embeddings, const RunMode& mode) {
  if (mode.use_task_metric && weights == nullptr) {
    throw std::invalid_argument("pseudo_label: task metric requested without task weights");
  }
  PseudoLabelTable table;
  table.distances = distance_table(unlabeled_embeddings, prototypes.centers,
                                   mode.use_task_metric ? weights->alpha : ad::Tensor{});
  table.probabilities = ad::softmax_rows(ad::scale(table.distances, -1.0));

  const std::size_t m = table.distances.dim(0);
  const std::size_t n = table.distances.dim(1);
  auto dv = table.distances.data();
  table.best_distance.resize(m);
  table.best_class.resize(m);
  for (std::size_t u = 0; u < m; ++u) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (dv[u * n + i] < dv[u * n + best]) best = i;
    }
    table.best_class[u] = best;
    table.best_distance[u] = dv[u * n + best];
  }
  return table;
}

std::vector<std::size_t> select_top_n(const PseudoLabelTable& table, std::size_t n) {
  if (n > table.size()) {
    throw std::invalid_argument("select_top_n: asked for " + std::to_string(n) + " of " +
                                std::to_string(table.size()) + " samples");
  }
  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return table.best_distance[a] < table.best_distance[b]; });
  order.resize(n);
  return order;
}

models::PrototypeSet refine_prototypes(const ad::Tensor& support_embeddings, std::span<const std::size_t> labels,
                                       std::size_t n_classes, const PseudoLabelTable& table,
                                       std::span<const std::size_t> selected, const ad::Tensor& unlabeled_embeddings) {
  ad::Tensor membership = models::indicator_matrix(labels, n_classes);
  std::vector<double> counts(n_classes, 0.0);
  for (std::size_t y : labels) counts[y] += 1.0;
  if (selected.empty()) {
    return {ad::weighted_mean_rows(membership, support_embeddings), std::move(counts)};
  }

  ad::Tensor soft = ad::rows(table.probabilities, selected);
  auto sv = soft.data();
  for (std::size_t r = 0; r < selected.size(); ++r) {
    for (std::size_t i = 0; i < n_classes; ++i) counts[i] += sv[r * n_classes + i];
  }
  ad::Tensor weights = ad::concat_rows({membership, soft});
  ad::Tensor points = ad::concat_rows({support_embeddings, ad::rows(unlabeled_embeddings, selected)});
  return {ad::weighted_mean_rows(weights, points), std::move(counts)};
}

}  // namespace sala::core
