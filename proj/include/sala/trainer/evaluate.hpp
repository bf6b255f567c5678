// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sala/core/run_mode.hpp"
#include "sala/core/schedule.hpp"
#include "sala/data/dataset.hpp"
#include "sala/data/episode.hpp"
#include "sala/models/checkpoint.hpp"
#include "sala/models/model.hpp"
#include "sala/trainer/config.hpp"

namespace sala::trainer {

/// Which episodes to draw and how to score them.
struct EvalPlan {
  data::EpisodeSpec spec;
  data::Partition partition = data::Partition::test;
  std::uint64_t seed = 0;
  SeedStream stream = SeedStream::test;
  std::size_t episodes = 1000;
  core::SelectionSchedule schedule;
  std::size_t schedule_index = 0;
  core::RunMode mode;
  std::size_t threads = 1;
};

struct EpisodeOutcome {
  double accuracy = 0.0;
  std::size_t selected = 0;
  std::optional<double> pseudo_precision;
  /// Largest |row sum - 1| over every probability table of the episode.
  double max_normalization_error = 0.0;
};

/// Runs the planned episodes with running batchnorm statistics and no tape.
/// Workers share `model` read-only; outcomes are ordered by episode index.
std::vector<EpisodeOutcome> run_evaluation(models::SalaModel& model, const data::Dataset& dataset,
                                           const EvalPlan& plan);

struct Summary {
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 * sample sd / sqrt(n)
};

Summary summarize(std::span<const double> values);

struct EvalReport {
  double mean_acc = 0.0;
  double ci95 = 0.0;
  std::size_t episodes = 0;
  std::optional<double> mean_pseudo_precision;
  std::vector<double> accuracies;
  std::string config_echo;
  std::string checkpoint_hash;
};

struct EvalSettings {
  std::size_t episodes = 1000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::optional<core::RunMode> mode;  // defaults to the trained mode
  data::Partition partition = data::Partition::test;
};

/// Test protocol: schedule at t = 1 and running batchnorm statistics.
EvalReport evaluate_model(models::SalaModel& model, const TrainConfig& config, const data::Dataset& dataset,
                          const data::EpisodeSpec& spec, const EvalSettings& settings);

EvalReport evaluate(const models::Checkpoint& checkpoint, const data::Dataset& dataset, const data::EpisodeSpec& spec,
                    const EvalSettings& settings = {});

/// {"mean_acc", "ci95", "episodes", "config_echo", "checkpoint_hash", ...}
std::string report_to_json(const EvalReport& report, int indent = 2);

}  // namespace sala::trainer
