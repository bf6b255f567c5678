// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/core/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sala::core {

double schedule_time(std::size_t episode_index, std::size_t total_episodes) {
  if (total_episodes == 0) throw std::invalid_argument("schedule_time: total_episodes must be positive");
  if (episode_index >= total_episodes) {
    throw std::out_of_range("schedule_time: episode " + std::to_string(episode_index) + " outside run of " +
                            std::to_string(total_episodes));
  }
  if (total_episodes == 1) return 0.0;
  return static_cast<double>(episode_index) / static_cast<double>(total_episodes - 1);
}

double schedule_weight(double eta, double t) {
  const double gap = 1.0 - t;
  return std::exp(-eta * gap * gap);
}

std::size_t selection_count(const SelectionSchedule& schedule, std::size_t episode_index, std::size_t unlabeled_count) {
  if (!(schedule.eta > 0.0)) throw std::invalid_argument("selection_count: eta must be positive");
  const double w = schedule_weight(schedule.eta, schedule_time(episode_index, schedule.total_episodes));
  const double m0 = static_cast<double>(schedule.max_selected);
  const auto n = static_cast<std::size_t>(std::floor(std::min(w * m0, m0)));
  return std::min({n, schedule.max_selected, unlabeled_count});
}

std::size_t default_max_selected(std::size_t unlabeled_total, bool has_distractors) {
  return has_distractors ? unlabeled_total / 2 : unlabeled_total;
}

}  // namespace sala::core
