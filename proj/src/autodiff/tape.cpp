// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/autodiff/tape.hpp"

#include <stdexcept>

namespace sala::ad {

namespace {
thread_local Tape* g_active = nullptr;
}

Tape* Tape::active() { return g_active; }

TapeScope::TapeScope(Tape& tape) : previous_(g_active) { g_active = &tape; }
TapeScope::~TapeScope() { g_active = previous_; }

bool should_record(std::initializer_list<const Tensor*> inputs) {
  if (g_active == nullptr) return false;
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

void Tape::record(const Tensor& output, std::vector<Tensor> inputs, BackwardFn backward) {
  if (consumed_) throw std::logic_error("cannot record onto a tape after backward");
  if (!output.requires_grad()) throw std::logic_error("recorded output must require grad");
  entries_.push_back(Entry{output.node(), std::move(inputs), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  if (consumed_) throw std::logic_error("backward already ran on this tape");
  if (entries_.empty()) throw std::logic_error("backward on an empty tape");
  if (loss.numel() != 1) {
    throw std::invalid_argument("backward requires a scalar loss, got shape " + shape_str(loss.shape()));
  }
  std::size_t last = entries_.size();
  while (last > 0 && entries_[last - 1].output != loss.node()) --last;
  if (last == 0) throw std::invalid_argument("loss was not produced on this tape");

  consumed_ = true;
  loss.node()->grad[0] += 1.0;
  for (std::size_t i = last; i-- > 0;) {
    Entry& e = entries_[i];
    e.backward(e.output->grad);
  }
}

void Tape::clear() {
  entries_.clear();
  consumed_ = false;
}

void backward(const Tensor& loss) {
  if (g_active == nullptr) throw std::logic_error("backward with no active tape");
  g_active->backward(loss);
}

}  // namespace sala::ad
