// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace sala::core {

/// Which parts of the algorithm are switched on.
///   sala         TM on,  PNS on,  unlabeled on
///   soft-kmeans  TM off, PNS off, unlabeled on  (one refinement step, Euclidean)
///   supervised   unlabeled off                  (plain prototypical network)
struct RunMode {
  bool use_task_metric = true;
  bool use_progressive_selection = true;
  bool use_unlabeled = true;

  static RunMode sala() { return {true, true, true}; }
  static RunMode soft_kmeans() { return {false, false, true}; }
  static RunMode supervised() { return {false, false, false}; }

  bool operator==(const RunMode&) const = default;
};

/// "sala", "soft-kmeans", "supervised", or "custom" for other flag combinations.
std::string to_string(const RunMode& mode);
RunMode run_mode_from_string(const std::string& name);

}  // namespace sala::core
