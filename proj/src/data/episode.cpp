// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/data/episode.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace sala::data {

void EpisodeSpec::validate() const {
  if (ways == 0 || shots == 0 || queries == 0 || unlabeled_per_class == 0) {
    throw std::invalid_argument("episode spec needs ways, shots, queries and unlabeled_per_class >= 1");
  }
}

namespace {

void append(SampleBatch& batch, const Dataset& dataset, SampleRef ref) {
  auto s = dataset.sample(ref.cls, ref.index);
  batch.values.insert(batch.values.end(), s.begin(), s.end());
  ++batch.count;
}

SampleBatch empty_batch(const Dataset& dataset) {
  SampleBatch b;
  b.sample_shape = dataset.sample_shape();
  return b;
}

}  // namespace

Episode sample_episode(const Dataset& dataset, const EpisodeSpec& spec, Partition partition) {
  spec.validate();
  std::vector<std::size_t> pool = dataset.classes_in(partition);
  if (pool.size() < spec.ways + spec.distractors) {
    throw std::invalid_argument("partition " + to_string(partition) + " has " + std::to_string(pool.size()) +
                                " classes, episode needs " + std::to_string(spec.ways) + " ways + " +
                                std::to_string(spec.distractors) + " distractors");
  }
  for (std::size_t c : pool) {
    const std::size_t n_lab = dataset.labeled_indices(c).size();
    const std::size_t n_unl = dataset.unlabeled_indices(c).size();
    if (n_lab < spec.shots + spec.queries || n_unl < spec.unlabeled_per_class) {
      throw std::invalid_argument("class '" + dataset.cls(c).name + "' has " + std::to_string(n_lab) +
                                  " labeled / " + std::to_string(n_unl) + " unlabeled samples, episode needs " +
                                  std::to_string(spec.shots + spec.queries) + " / " +
                                  std::to_string(spec.unlabeled_per_class));
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::shuffle(pool.begin(), pool.end(), rng);

  Episode ep;
  ep.task.ways = spec.ways;
  ep.task.support = empty_batch(dataset);
  ep.task.query = empty_batch(dataset);
  ep.task.unlabeled = empty_batch(dataset);
  ep.classes.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(spec.ways));
  ep.distractor_classes.assign(pool.begin() + static_cast<std::ptrdiff_t>(spec.ways),
                               pool.begin() + static_cast<std::ptrdiff_t>(spec.ways + spec.distractors));

  struct Pending {
    SampleRef ref;
    int truth;
  };
  std::vector<Pending> unlabeled;

  for (std::size_t i = 0; i < spec.ways; ++i) {
    const std::size_t c = ep.classes[i];
    auto labeled = dataset.labeled_indices(c);
    std::shuffle(labeled.begin(), labeled.end(), rng);
    for (std::size_t k = 0; k < spec.shots; ++k) ep.support_refs.push_back({c, labeled[k]});
    for (std::size_t q = 0; q < spec.queries; ++q) ep.query_refs.push_back({c, labeled[spec.shots + q]});
    for (std::size_t k = 0; k < spec.shots; ++k) ep.task.support_labels.push_back(i);
    for (std::size_t q = 0; q < spec.queries; ++q) ep.task.query_labels.push_back(i);

    auto pool_u = dataset.unlabeled_indices(c);
    std::shuffle(pool_u.begin(), pool_u.end(), rng);
    for (std::size_t h = 0; h < spec.unlabeled_per_class; ++h) {
      unlabeled.push_back({{c, pool_u[h]}, static_cast<int>(i)});
    }
  }
  for (std::size_t c : ep.distractor_classes) {
    auto pool_u = dataset.unlabeled_indices(c);
    std::shuffle(pool_u.begin(), pool_u.end(), rng);
    for (std::size_t h = 0; h < spec.unlabeled_per_class; ++h) {
      unlabeled.push_back({{c, pool_u[h]}, UnlabeledTruth::kDistractor});
    }
  }
  std::shuffle(unlabeled.begin(), unlabeled.end(), rng);

  for (const SampleRef& r : ep.support_refs) append(ep.task.support, dataset, r);
  for (const SampleRef& r : ep.query_refs) append(ep.task.query, dataset, r);
  for (const Pending& u : unlabeled) {
    append(ep.task.unlabeled, dataset, u.ref);
    ep.unlabeled_refs.push_back(u.ref);
    ep.truth.episode_class.push_back(u.truth);
  }
  return ep;
}

}  // namespace sala::data
