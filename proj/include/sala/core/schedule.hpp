// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace sala::core {

/// Progressive selection: n = min(floor(w(t) * M0), M0) with
/// w(t) = exp(-eta * (1 - t)^2) and t the episode index mapped onto [0, 1].
struct SelectionSchedule {
  double eta = 5.0;
  std::size_t max_selected = 75;  // M0
  std::size_t total_episodes = 1;
};

/// index / (total - 1), or 0 for single-episode runs.
double schedule_time(std::size_t episode_index, std::size_t total_episodes);

double schedule_weight(double eta, double t);

/// Number of unlabeled samples to keep, clamped to `unlabeled_count`.
std::size_t selection_count(const SelectionSchedule& schedule, std::size_t episode_index, std::size_t unlabeled_count);

/// M0 = M/2 when distractors are present, M otherwise.
std::size_t default_max_selected(std::size_t unlabeled_total, bool has_distractors);

}  // namespace sala::core
