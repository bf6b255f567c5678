// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/models/prototypes.hpp"

#include <stdexcept>
#include <string>

#include "sala/autodiff/ops.hpp"

namespace sala::models {

ad::Tensor indicator_matrix(std::span<const std::size_t> labels, std::size_t n_classes) {
  std::vector<double> z(labels.size() * n_classes, 0.0);
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] >= n_classes) {
      throw std::out_of_range("label " + std::to_string(labels[s]) + " outside " + std::to_string(n_classes) +
                              " classes");
    }
    z[s * n_classes + labels[s]] = 1.0;
  }
  return ad::Tensor::from({labels.size(), n_classes}, std::move(z));
}

PrototypeSet compute_prototypes(const ad::Tensor& embeddings, std::span<const std::size_t> labels,
                                std::size_t n_classes) {
  if (embeddings.rank() != 2 || embeddings.dim(0) != labels.size()) {
    throw std::invalid_argument("compute_prototypes: " + std::to_string(labels.size()) + " labels for embeddings " +
                                ad::shape_str(embeddings.shape()));
  }
  std::vector<double> counts(n_classes, 0.0);
  for (std::size_t y : labels) {
    if (y >= n_classes) throw std::out_of_range("label " + std::to_string(y) + " outside episode classes");
    counts[y] += 1.0;
  }
  for (std::size_t i = 0; i < n_classes; ++i) {
    if (counts[i] == 0.0) throw std::invalid_argument("compute_prototypes: class " + std::to_string(i) + " is empty");
  }
  return PrototypeSet{ad::weighted_mean_rows(indicator_matrix(labels, n_classes), embeddings), std::move(counts)};
}

}  // namespace sala::models
