// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "sala/autodiff/tensor.hpp"

namespace sala::core {

/// sum_j (x_j - c_j)^2
double euclidean_distance(std::span<const double> x, std::span<const double> c);

/// sum_j alpha_j (x_j - c_j)^2 with every alpha_j >= 0. Summation order matches
/// euclidean_distance, so alpha == 1 reproduces it bit for bit.
double adaptive_distance(std::span<const double> x, std::span<const double> c, std::span<const double> alpha);

/// p_i = exp(-d_i) / sum_k exp(-d_k), max-shifted.
std::vector<double> class_probabilities(std::span<const double> distances);

/// Differentiable distance table D[u, i] between rows of x [M x d] and
/// centers [N x d]. With `alpha` [N x d] defined this is the task-adaptive
/// metric, otherwise squared Euclidean.
ad::Tensor distance_table(const ad::Tensor& x, const ad::Tensor& centers, const ad::Tensor& alpha = {});

}  // namespace sala::core
