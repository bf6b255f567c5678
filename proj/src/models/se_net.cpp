// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/models/se_net.hpp"

#include <algorithm>
#include <stdexcept>

#include "sala/autodiff/ops.hpp"

namespace sala::models {

std::size_t se_hidden_width(std::size_t dim, std::size_t reduction_ratio) {
  if (reduction_ratio == 0) throw std::invalid_argument("SE reduction ratio must be positive");
  return std::max<std::size_t>(1, dim / reduction_ratio);
}

SENet::SENet(std::size_t dim, std::size_t reduction_ratio, std::mt19937_64& rng)
    : dim_(dim), reduction_ratio_(reduction_ratio), hidden_(se_hidden_width(dim, reduction_ratio)) {
  if (dim == 0) throw std::invalid_argument("SE input dim must be positive");
  params_.push_back({"reduce.weight", he_uniform({dim_, hidden_}, dim_, rng)});
  params_.push_back({"reduce.bias", ad::Tensor::zeros({hidden_}, true)});
  params_.push_back({"expand.weight", he_uniform({hidden_, dim_}, hidden_, rng)});
  params_.push_back({"expand.bias", ad::Tensor::zeros({dim_}, true)});
}

ad::Tensor SENet::forward(const ad::Tensor& x) const {
  if (x.rank() != 2 || x.dim(1) != dim_) {
    throw std::invalid_argument("SE network of dim " + std::to_string(dim_) + " got input " + ad::shape_str(x.shape()));
  }
  ad::Tensor squeezed = ad::relu(ad::dense(x, params_[0].value, params_[1].value));
  return ad::sigmoid(ad::dense(squeezed, params_[2].value, params_[3].value));
}

TaskWeights generate_task_weights(const SENet& se, const PrototypeSet& prototypes) {
  return TaskWeights{se.forward(prototypes.centers)};
}

}  // namespace sala::models
