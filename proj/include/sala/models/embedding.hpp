// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "sala/autodiff/ops.hpp"
#include "sala/autodiff/tensor.hpp"
#include "sala/models/parameter.hpp"

namespace sala::models {

enum class EmbeddingKind { convnet4, mlp };

std::string to_string(EmbeddingKind kind);
EmbeddingKind embedding_kind_from_string(const std::string& name);

struct ConvNetOptions {
  std::size_t filters = 64;
  double bn_momentum = 0.9;
  double bn_eps = 1e-5;
};

/// Feature extractor mapping a batch of samples to [B x d] embeddings.
///
/// convnet4: four blocks of conv3x3 -> batchnorm -> relu -> maxpool2x2 on
/// [C x H x W] samples; odd spatial extents are floored by the pool, so
/// 28x28 gives d = 64 and 84x84 gives d = 1600.
/// mlp: dense -> relu -> dense -> relu -> dense on flat vectors.
class EmbeddingNet {
 public:
  static EmbeddingNet convnet4(const ad::Shape& sample_shape, std::mt19937_64& rng, ConvNetOptions options = {});
  static EmbeddingNet mlp(std::size_t input_dim, std::array<std::size_t, 2> hidden, std::size_t output_dim,
                          std::mt19937_64& rng);
  /// Exact identity map on R^dim written as an MLP with hidden width 2*dim,
  /// using x = relu(x) - relu(-x).
  static EmbeddingNet identity_mlp(std::size_t dim);

  EmbeddingKind kind() const { return kind_; }
  const ad::Shape& sample_shape() const { return sample_shape_; }
  std::size_t output_dim() const { return output_dim_; }

  /// `batch` is [B x sample_shape...]. Returns [B x d].
  ad::Tensor embed(const ad::Tensor& batch, ad::NormMode mode);

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }

  /// Parameters plus batchnorm running statistics.
  std::vector<NamedArray> state() const;
  void load_state(const std::vector<NamedArray>& arrays);

 private:
  EmbeddingNet() = default;
  const ad::Tensor& param(std::size_t index) const { return params_[index].value; }

  EmbeddingKind kind_ = EmbeddingKind::mlp;
  ad::Shape sample_shape_;
  std::size_t output_dim_ = 0;
  std::vector<Parameter> params_;
  std::vector<ad::BatchNormState> norms_;  // convnet4 only, one per block
};

/// Computes the pooled output extent of convnet4 for one spatial axis.
std::size_t convnet4_extent(std::size_t extent);

}  // namespace sala::models
