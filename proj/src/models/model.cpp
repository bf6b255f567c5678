// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/models/model.hpp"

namespace sala::models {

std::vector<Parameter> SalaModel::parameters() const {
  std::vector<Parameter> out;
  for (const Parameter& p : embedding.parameters()) out.push_back({"embed." + p.name, p.value});
  for (const Parameter& p : se.parameters()) out.push_back({"se." + p.name, p.value});
  return out;
}

std::vector<NamedArray> SalaModel::state() const {
  std::vector<NamedArray> out;
  for (NamedArray a : embedding.state()) {
    a.name = "embed." + a.name;
    out.push_back(std::move(a));
  }
  for (const Parameter& p : se.parameters()) {
    NamedArray a = snapshot(p);
    a.name = "se." + a.name;
    out.push_back(std::move(a));
  }
  return out;
}

void SalaModel::load_state(const std::vector<NamedArray>& arrays) {
  std::vector<NamedArray> embed_arrays;
  for (const NamedArray& a : arrays) {
    if (a.name.rfind("embed.", 0) == 0) embed_arrays.push_back({a.name.substr(6), a.shape, a.values});
  }
  embedding.load_state(embed_arrays);
  assign_parameters(se.parameters(), arrays, "se.");
}

void SalaModel::zero_grad() {
  for (Parameter& p : embedding.parameters()) p.value.zero_grad();
  for (Parameter& p : se.parameters()) p.value.zero_grad();
}

}  // namespace sala::models
