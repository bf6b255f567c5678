// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/core/run_mode.hpp"

#include <stdexcept>

namespace sala::core {

std::string to_string(const RunMode& mode) {
  if (mode == RunMode::sala()) return "sala";
  if (mode == RunMode::soft_kmeans()) return "soft-kmeans";
  if (mode == RunMode::supervised()) return "supervised";
  return "custom";
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "sala") return RunMode::sala();
  if (name == "soft-kmeans") return RunMode::soft_kmeans();
  if (name == "supervised") return RunMode::supervised();
  if (name == "tm-only") return RunMode{true, false, true};
  if (name == "pns-only") return RunMode{false, true, true};
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected sala, soft-kmeans, supervised, tm-only or pns-only)");
}

}  // namespace sala::core
