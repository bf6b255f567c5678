// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sala/models/embedding.hpp"
#include "sala/models/se_net.hpp"

namespace sala::models {

/// Embedding network plus SE metric-weight generator.
struct SalaModel {
  EmbeddingNet embedding;
  SENet se;

  /// Handles onto every trainable tensor, embedding first.
  std::vector<Parameter> parameters() const;
  std::vector<NamedArray> state() const;
  void load_state(const std::vector<NamedArray>& arrays);
  void zero_grad();
};

}  // namespace sala::models
