// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "sala/data/dataset.hpp"

namespace sala::data {

/// N-way K-shot episode composition. `queries` is per class; the unlabeled
/// set holds `unlabeled_per_class` samples from each episode class plus each
/// of `distractors` extra classes.
struct EpisodeSpec {
  std::size_t ways = 5;
  std::size_t shots = 1;
  std::size_t queries = 15;
  std::size_t unlabeled_per_class = 15;
  std::size_t distractors = 0;
  std::uint64_t seed = 0;

  /// M = N*H + C*H.
  std::size_t unlabeled_total() const { return (ways + distractors) * unlabeled_per_class; }
  void validate() const;

  bool operator==(const EpisodeSpec&) const = default;
};

/// Row-major stack of samples, [count x sample_shape...].
struct SampleBatch {
  SampleShape sample_shape;
  std::size_t count = 0;
  std::vector<double> values;
};

/// What the algorithm sees of an episode: no ground truth for the unlabeled set.
struct TaskData {
  std::size_t ways = 0;
  SampleBatch support;
  std::vector<std::size_t> support_labels;  // episode-local class index
  SampleBatch query;
  std::vector<std::size_t> query_labels;
  SampleBatch unlabeled;
};

/// Hidden classes of the unlabeled set; read only by diagnostics.
struct UnlabeledTruth {
  static constexpr int kDistractor = -1;
  std::vector<int> episode_class;  // kDistractor for distractor samples
};

struct SampleRef {
  std::size_t cls = 0;
  std::size_t index = 0;
  auto operator<=>(const SampleRef&) const = default;
};

struct Episode {
  TaskData task;
  UnlabeledTruth truth;
  std::vector<std::size_t> classes;  // dataset class of each episode class
  std::vector<std::size_t> distractor_classes;
  std::vector<SampleRef> support_refs, query_refs, unlabeled_refs;
};

/// Support and query come from the labeled split, the unlabeled set from the
/// unlabeled split; sampling is without replacement and seeded by spec.seed.
Episode sample_episode(const Dataset& dataset, const EpisodeSpec& spec, Partition partition);

}  // namespace sala::data
