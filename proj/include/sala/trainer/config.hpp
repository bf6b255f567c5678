// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sala/core/run_mode.hpp"
#include "sala/core/schedule.hpp"
#include "sala/data/episode.hpp"
#include "sala/models/embedding.hpp"
#include "sala/trainer/adam.hpp"

namespace sala::trainer {

struct ModelConfig {
  models::EmbeddingKind embedding = models::EmbeddingKind::mlp;
  std::array<std::size_t, 2> hidden{64, 64};  // mlp
  std::size_t output_dim = 16;                // mlp
  std::size_t filters = 64;                   // convnet4
  std::size_t reduction_ratio = 4;
  /// Sample shape the network was built for; empty means "take it from the dataset".
  std::vector<std::size_t> input_shape;

  bool operator==(const ModelConfig&) const = default;
};

struct ScheduleConfig {
  double eta = 5.0;
  std::optional<std::size_t> max_selected;  // M0; default depends on the episode shape

  bool operator==(const ScheduleConfig&) const = default;
};

struct TrainConfig {
  std::uint64_t seed = 0;
  core::RunMode mode = core::RunMode::sala();
  double learning_rate = 1e-3;
  std::size_t total_episodes = 20'000;
  std::size_t eval_every = 2'500;
  std::size_t validation_episodes = 200;
  std::size_t test_episodes = 1'000;
  std::size_t threads = 1;
  AdamOptions adam;
  ScheduleConfig schedule;
  ModelConfig model;
  data::EpisodeSpec train_episode;
  data::EpisodeSpec validation_episode;
  data::EpisodeSpec test_episode;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;

  /// Configured M0, or M / 2 with distractors and M without.
  std::size_t max_selected(const data::EpisodeSpec& spec) const;

  core::SelectionSchedule training_schedule() const;

  bool operator==(const TrainConfig&) const = default;
};

/// Canonical JSON text; keys are sorted so equal configs give equal bytes.
std::string config_to_json(const TrainConfig& config, int indent = -1);

/// Missing keys keep their defaults; unknown keys are an error.
TrainConfig config_from_json(const std::string& text);

TrainConfig load_config(const std::filesystem::path& path);

enum class SeedStream : std::uint64_t { init = 1, train = 2, validation = 3, test = 4 };

/// Independent 64-bit seed for item `index` of a stream.
std::uint64_t derive_seed(std::uint64_t base, SeedStream stream, std::uint64_t index);

}  // namespace sala::trainer
