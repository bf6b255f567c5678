// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "sala/data/dataset.hpp"

namespace sala::data {

/// Isotropic Gaussian clusters for desk-scale runs.
struct SyntheticSpec {
  std::size_t n_classes = 100;
  std::size_t dim = 16;
  double cluster_std = 1.0;
  double separation = 3.0;  // minimum pairwise distance between class means
  std::size_t samples_per_class = 100;
  std::uint64_t seed = 0;
  double labeled_fraction = 0.4;
  double train_fraction = 0.64;       // of classes
  double validation_fraction = 0.16;  // of classes; the rest are test

  void validate() const;
};

/// Class means [n_classes x dim], pairwise at least `separation` apart and
/// packed close to that bound.
std::vector<double> synthetic_means(const SyntheticSpec& spec);

Dataset gen_synthetic(const SyntheticSpec& spec);

}  // namespace sala::data
