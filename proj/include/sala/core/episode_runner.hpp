// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sala/autodiff/ops.hpp"
#include "sala/core/pseudo_label.hpp"
#include "sala/core/run_mode.hpp"
#include "sala/core/schedule.hpp"
#include "sala/data/episode.hpp"
#include "sala/models/model.hpp"

namespace sala::core {

/// Summed query cross-entropy against the refined prototypes. The metric
/// is the task-adaptive one (same alpha as pseudo-labeling) when
/// mode.use_task_metric and weights are given.
ad::Tensor episode_loss(const models::PrototypeSet& refined, const models::TaskWeights* weights,
                        const ad::Tensor& query_embeddings, std::span<const std::size_t> query_labels,
                        const RunMode& mode);

struct EpisodeMetrics {
  double loss = 0.0;
  double query_accuracy = 0.0;
  std::size_t selected = 0;  // n
  std::optional<double> mean_best_distance;
};

struct EpisodeResult {
  ad::Tensor loss;
  EpisodeMetrics metrics;
  models::PrototypeSet prototypes;  // support means
  models::PrototypeSet refined;
  std::optional<models::TaskWeights> weights;
  std::optional<PseudoLabelTable> table;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> query_predictions;
  ad::Tensor support_embeddings, unlabeled_embeddings, query_embeddings;
};

/// One pass over an episode: embed, prototypes, task weights, pseudo labels,
/// progressive selection, refinement, query loss. `norm` chooses batch or
/// running statistics for any batchnorm layers in the embedding.
EpisodeResult run_episode(models::SalaModel& model, const data::TaskData& task, const SelectionSchedule& schedule,
                          std::size_t episode_index, const RunMode& mode, ad::NormMode norm = ad::NormMode::train);

/// Fraction of selected samples whose pseudo label equals their hidden class
/// (distractors always count as wrong). Empty when nothing was selected.
std::optional<double> pseudo_label_precision(const EpisodeResult& result, const data::UnlabeledTruth& truth);

/// Packs samples into a [count x sample_shape...] tensor.
ad::Tensor to_tensor(const data::SampleBatch& batch);

}  // namespace sala::core
