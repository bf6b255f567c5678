// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sala/data/dataset.hpp"
#include "sala/models/checkpoint.hpp"
#include "sala/trainer/config.hpp"

namespace sala::trainer {

struct ValidationPoint {
  std::size_t episode = 0;
  double accuracy = 0.0;
};

struct TrainResult {
  TrainConfig config;        // resolved against the dataset
  models::Checkpoint best;   // initial parameters until the first validation
  models::Checkpoint final;  // parameters after the last episode
  std::optional<double> best_val_acc;
  std::optional<std::size_t> best_episode;
  std::vector<ValidationPoint> curve;
  /// JSON lines: one record per training episode and {episode, val_acc}
  /// after each validation pass.
  std::vector<std::string> log;
};

/// Called after every log line is produced; lets callers stream progress.
using LogSink = std::function<void(const std::string&)>;

/// Episodic training: sample, run, backpropagate, Adam step. Validation runs
/// every eval_every episodes and after the last one, using the schedule time
/// of the current episode. Non-finite losses abort with the episode index.
TrainResult train(const TrainConfig& config, const data::Dataset& dataset, const LogSink& sink = {});

}  // namespace sala::trainer
