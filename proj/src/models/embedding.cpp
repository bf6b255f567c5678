// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/models/embedding.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace sala::models {

std::string to_string(EmbeddingKind kind) { return kind == EmbeddingKind::convnet4 ? "convnet4" : "mlp"; }

EmbeddingKind embedding_kind_from_string(const std::string& name) {
  if (name == "convnet4") return EmbeddingKind::convnet4;
  if (name == "mlp") return EmbeddingKind::mlp;
  throw std::invalid_argument("unknown embedding kind '" + name + "' (expected convnet4 or mlp)");
}

ad::Tensor he_uniform(ad::Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(ad::shape_numel(shape));
  for (double& x : v) x = dist(rng);
  return ad::Tensor::from(std::move(shape), std::move(v), true);
}

NamedArray snapshot(const Parameter& p) {
  return NamedArray{p.name, p.value.shape(), {p.value.data().begin(), p.value.data().end()}};
}

void assign_parameters(std::vector<Parameter>& params, const std::vector<NamedArray>& arrays,
                       const std::string& prefix) {
  std::map<std::string, const NamedArray*> by_name;
  for (const NamedArray& a : arrays) by_name[a.name] = &a;
  for (Parameter& p : params) {
    auto it = by_name.find(prefix + p.name);
    if (it == by_name.end()) throw std::invalid_argument("missing parameter '" + prefix + p.name + "'");
    const NamedArray& a = *it->second;
    if (a.shape != p.value.shape()) {
      throw std::invalid_argument("parameter '" + a.name + "' has shape " + ad::shape_str(a.shape) +
                                  ", model expects " + ad::shape_str(p.value.shape()));
    }
    std::copy(a.values.begin(), a.values.end(), p.value.mutable_data().begin());
  }
}

std::size_t convnet4_extent(std::size_t extent) {
  for (int block = 0; block < 4; ++block) extent /= 2;
  return extent;
}

EmbeddingNet EmbeddingNet::convnet4(const ad::Shape& sample_shape, std::mt19937_64& rng, ConvNetOptions options) {
  if (sample_shape.size() != 3) {
    throw std::invalid_argument("convnet4 expects [C x H x W] samples, got " + ad::shape_str(sample_shape));
  }
  const std::size_t out_h = convnet4_extent(sample_shape[1]);
  const std::size_t out_w = convnet4_extent(sample_shape[2]);
  if (out_h == 0 || out_w == 0) {
    throw std::invalid_argument("convnet4 needs spatial extents >= 16, got " + ad::shape_str(sample_shape));
  }
  EmbeddingNet net;
  net.kind_ = EmbeddingKind::convnet4;
  net.sample_shape_ = sample_shape;
  net.output_dim_ = options.filters * out_h * out_w;
  std::size_t in_channels = sample_shape[0];
  for (std::size_t b = 0; b < 4; ++b) {
    const std::string block = "block" + std::to_string(b) + ".";
    const std::size_t f = options.filters;
    net.params_.push_back({block + "conv.weight", he_uniform({f, in_channels, 3, 3}, in_channels * 9, rng)});
    net.params_.push_back({block + "conv.bias", ad::Tensor::zeros({f}, true)});
    net.params_.push_back({block + "bn.gamma", ad::Tensor::full({f}, 1.0, true)});
    net.params_.push_back({block + "bn.beta", ad::Tensor::zeros({f}, true)});
    ad::BatchNormState norm(f);
    norm.momentum = options.bn_momentum;
    norm.eps = options.bn_eps;
    net.norms_.push_back(std::move(norm));
    in_channels = f;
  }
  return net;
}

EmbeddingNet EmbeddingNet::mlp(std::size_t input_dim, std::array<std::size_t, 2> hidden, std::size_t output_dim,
                               std::mt19937_64& rng) {
  if (input_dim == 0 || hidden[0] == 0 || hidden[1] == 0 || output_dim == 0) {
    throw std::invalid_argument("mlp widths must be positive");
  }
  EmbeddingNet net;
  net.kind_ = EmbeddingKind::mlp;
  net.sample_shape_ = {input_dim};
  net.output_dim_ = output_dim;
  const std::array<std::size_t, 4> widths{input_dim, hidden[0], hidden[1], output_dim};
  for (std::size_t l = 0; l < 3; ++l) {
    const std::string layer = "fc" + std::to_string(l) + ".";
    net.params_.push_back({layer + "weight", he_uniform({widths[l], widths[l + 1]}, widths[l], rng)});
    net.params_.push_back({layer + "bias", ad::Tensor::zeros({widths[l + 1]}, true)});
  }
  return net;
}

EmbeddingNet EmbeddingNet::identity_mlp(std::size_t dim) {
  std::mt19937_64 rng(0);
  EmbeddingNet net = mlp(dim, {2 * dim, 2 * dim}, dim, rng);
  auto w0 = net.params_[0].value.mutable_data();  // [d x 2d] = [I, -I]
  auto w1 = net.params_[2].value.mutable_data();  // [2d x 2d] = I
  auto w2 = net.params_[4].value.mutable_data();  // [2d x d] = [I; -I]
  std::fill(w0.begin(), w0.end(), 0.0);
  std::fill(w1.begin(), w1.end(), 0.0);
  std::fill(w2.begin(), w2.end(), 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    w0[i * 2 * dim + i] = 1.0;
    w0[i * 2 * dim + dim + i] = -1.0;
    w2[i * dim + i] = 1.0;
    w2[(dim + i) * dim + i] = -1.0;
  }
  for (std::size_t i = 0; i < 2 * dim; ++i) w1[i * 2 * dim + i] = 1.0;
  return net;
}

ad::Tensor EmbeddingNet::embed(const ad::Tensor& batch, ad::NormMode mode) {
  const ad::Shape& shape = batch.shape();
  const bool shape_ok =
      shape.size() == sample_shape_.size() + 1 && std::equal(sample_shape_.begin(), sample_shape_.end(), shape.begin() + 1);
  if (!shape_ok) {
    throw std::invalid_argument(to_string(kind_) + " expects batches of " + ad::shape_str(sample_shape_) +
                                " samples, got " + ad::shape_str(shape));
  }
  if (kind_ == EmbeddingKind::mlp) {
    ad::Tensor h = ad::relu(ad::dense(batch, param(0), param(1)));
    h = ad::relu(ad::dense(h, param(2), param(3)));
    return ad::dense(h, param(4), param(5));
  }
  ad::Tensor x = batch;
  for (std::size_t b = 0; b < 4; ++b) {
    x = ad::conv2d(x, param(4 * b), param(4 * b + 1));
    x = ad::batchnorm2d(x, param(4 * b + 2), param(4 * b + 3), mode, norms_[b]);
    x = ad::maxpool2x2(ad::relu(x), ad::PoolEdge::floor);
  }
  return ad::flatten(x);
}

std::vector<NamedArray> EmbeddingNet::state() const {
  std::vector<NamedArray> out;
  for (const Parameter& p : params_) out.push_back(snapshot(p));
  for (std::size_t b = 0; b < norms_.size(); ++b) {
    const std::string block = "block" + std::to_string(b) + ".bn.";
    const std::size_t c = norms_[b].running_mean.size();
    out.push_back({block + "running_mean", {c}, norms_[b].running_mean});
    out.push_back({block + "running_var", {c}, norms_[b].running_var});
  }
  return out;
}

void EmbeddingNet::load_state(const std::vector<NamedArray>& arrays) {
  assign_parameters(params_, arrays, "");
  for (std::size_t b = 0; b < norms_.size(); ++b) {
    const std::string block = "block" + std::to_string(b) + ".bn.";
    for (const NamedArray& a : arrays) {
      std::vector<double>* target = nullptr;
      if (a.name == block + "running_mean") target = &norms_[b].running_mean;
      if (a.name == block + "running_var") target = &norms_[b].running_var;
      if (target == nullptr) continue;
      if (a.values.size() != target->size()) {
        throw std::invalid_argument("buffer '" + a.name + "' has " + std::to_string(a.values.size()) + " values");
      }
      *target = a.values;
    }
  }
}

}  // namespace sala::models
