// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/trainer/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sala::trainer {

void adam_step(std::span<models::Parameter> params, AdamState& state, double learning_rate,
               const AdamOptions& options) {
  if (state.step == 0 && state.first.empty()) {
    for (const auto& p : params) {
      state.first.emplace_back(p.value.numel(), 0.0);
      state.second.emplace_back(p.value.numel(), 0.0);
    }
  }
  if (state.first.size() != params.size()) {
    throw std::invalid_argument("adam_step: state tracks " + std::to_string(state.first.size()) + " parameters, got " +
                                std::to_string(params.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = params[k];
    if (state.first[k].size() != p.value.numel()) {
      throw std::invalid_argument("adam_step: moment size mismatch for '" + p.name + "'");
    }
    if (!p.value.requires_grad()) continue;
    for (double g : p.value.grad()) {
      if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient in parameter '" + p.name + "'");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    if (!p.value.requires_grad()) continue;
    auto w = p.value.mutable_data();
    auto g = p.value.grad();
    auto& m = state.first[k];
    auto& v = state.second[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * g[i];
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + options.eps);
    }
    p.value.zero_grad();
  }
}

}  // namespace sala::trainer
