// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <vector>

#include "sala/autodiff/tensor.hpp"

namespace sala::models {

/// Trainable leaf tensor with a stable dotted name, e.g. "se.reduce.weight".
struct Parameter {
  std::string name;
  ad::Tensor value;
};

/// Plain named array: the unit of checkpoint storage.
struct NamedArray {
  std::string name;
  ad::Shape shape;
  std::vector<double> values;

  bool operator==(const NamedArray&) const = default;
};

/// Zero-mean uniform init with bound sqrt(6 / fan_in).
ad::Tensor he_uniform(ad::Shape shape, std::size_t fan_in, std::mt19937_64& rng);

/// Copies values of `arrays` into same-named parameters; names and shapes must match.
void assign_parameters(std::vector<Parameter>& params, const std::vector<NamedArray>& arrays,
                       const std::string& prefix);

NamedArray snapshot(const Parameter& p);

}  // namespace sala::models
