// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "sala/data/dataset.hpp"
#include "sala/models/checkpoint.hpp"
#include "sala/models/model.hpp"
#include "sala/trainer/config.hpp"

namespace sala::trainer {

/// Fills model.input_shape from the dataset, or checks that it matches.
TrainConfig resolve_config(TrainConfig config, const data::Dataset& dataset);

/// Fresh model for a resolved config, initialised from `seed`.
models::SalaModel build_model(const TrainConfig& config, std::uint64_t seed);

/// Parameters and batchnorm buffers, with the config echoed as canonical JSON.
models::Checkpoint make_checkpoint(const models::SalaModel& model, const TrainConfig& config);

struct RestoredModel {
  TrainConfig config;
  models::SalaModel model;
};

/// Rebuilds the architecture from the echoed config and loads the arrays.
RestoredModel restore_model(const models::Checkpoint& checkpoint);

}  // namespace sala::trainer
