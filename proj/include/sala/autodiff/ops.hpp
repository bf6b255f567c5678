// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sala/autodiff/tensor.hpp"

namespace sala::ad {

// Elementwise. Shapes must match, or one side must hold a single element.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

/// Sum of all elements, shape {1}.
Tensor sum(const Tensor& x);

// Matrices (rank 2).
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
/// x[B x n] + bias[n] broadcast over rows.
Tensor add_row_bias(const Tensor& x, const Tensor& bias);
/// x[B x in] * w[in x out] + bias[out].
Tensor dense(const Tensor& x, const Tensor& w, const Tensor& bias);

Tensor reshape(const Tensor& x, Shape shape);
/// Collapses all trailing axes: [B x ...] -> [B x rest].
Tensor flatten(const Tensor& x);
/// Gathers the listed rows of a rank-2 tensor (indices may repeat).
Tensor rows(const Tensor& x, std::span<const std::size_t> indices);
/// Stacks rank-2 tensors with equal column counts.
Tensor concat_rows(const std::vector<Tensor>& parts);

/// Row-wise softmax / log-softmax of a rank-2 tensor (max-subtracted).
Tensor softmax_rows(const Tensor& x);
Tensor log_softmax_rows(const Tensor& x);
/// out[r] = x[r, cols[r]].
Tensor pick(const Tensor& x, std::span<const std::size_t> cols);

/// out[i, :] = sum_r w[r, i] x[r, :] / sum_r w[r, i]. Weights must have
/// positive column sums.
Tensor weighted_mean_rows(const Tensor& weights, const Tensor& x);

// Image layers, NCHW.

/// 3x3 cross-correlation, stride 1, zero padding 1.
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias);

enum class NormMode { train, eval };

struct BatchNormState {
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.9;  // weight kept by the running stats per update
  double eps = 1e-5;

  explicit BatchNormState(std::size_t channels = 0)
      : running_mean(channels, 0.0), running_var(channels, 1.0) {}
};

/// Train mode normalizes with batch statistics over (B, H, W) and updates
/// the running stats in `state`; eval mode uses the running stats.
Tensor batchnorm2d(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                   NormMode mode, BatchNormState& state);

enum class PoolEdge {
  strict,  // odd H or W is an error
  floor,   // trailing odd row/column dropped
};

/// 2x2 max-pool with stride 2. Ties go to the first element in row-major order.
Tensor maxpool2x2(const Tensor& x, PoolEdge edge = PoolEdge::strict);

}  // namespace sala::ad
