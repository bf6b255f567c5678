// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/trainer/model_io.hpp"

#include <random>
#include <stdexcept>

namespace sala::trainer {

TrainConfig resolve_config(TrainConfig config, const data::Dataset& dataset) {
  if (config.model.input_shape.empty()) {
    config.model.input_shape = dataset.sample_shape();
  } else if (config.model.input_shape != dataset.sample_shape()) {
    throw std::invalid_argument("model input shape " + ad::shape_str(config.model.input_shape) +
                                " does not match dataset samples " + ad::shape_str(dataset.sample_shape()));
  }
  return config;
}

models::SalaModel build_model(const TrainConfig& config, std::uint64_t seed) {
  const auto& shape = config.model.input_shape;
  if (shape.empty()) throw std::invalid_argument("build_model: model input shape is not resolved");
  std::mt19937_64 rng(seed);
  if (config.model.embedding == models::EmbeddingKind::mlp) {
    if (shape.size() != 1) {
      throw std::invalid_argument("mlp embedding needs vector samples, got " + ad::shape_str(shape));
    }
    auto net = models::EmbeddingNet::mlp(shape[0], config.model.hidden, config.model.output_dim, rng);
    const std::size_t d = net.output_dim();
    return {std::move(net), models::SENet(d, config.model.reduction_ratio, rng)};
  }
  models::ConvNetOptions opts;
  opts.filters = config.model.filters;
  auto net = models::EmbeddingNet::convnet4(shape, rng, opts);
  const std::size_t d = net.output_dim();
  return {std::move(net), models::SENet(d, config.model.reduction_ratio, rng)};
}

models::Checkpoint make_checkpoint(const models::SalaModel& model, const TrainConfig& config) {
  return {config_to_json(config), model.state()};
}

RestoredModel restore_model(const models::Checkpoint& checkpoint) {
  TrainConfig config = config_from_json(checkpoint.config_echo);
  models::SalaModel model = build_model(config, 0);
  model.load_state(checkpoint.arrays);
  return {std::move(config), std::move(model)};
}

}  // namespace sala::trainer
