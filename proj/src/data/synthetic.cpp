// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/data/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace sala::data {

void SyntheticSpec::validate() const {
  if (n_classes == 0 || dim == 0 || samples_per_class == 0) {
    throw std::invalid_argument("synthetic data needs positive class count, dim and samples per class");
  }
  if (!(separation > 0.0) || !(cluster_std >= 0.0)) {
    throw std::invalid_argument("synthetic data needs separation > 0 and cluster_std >= 0");
  }
  if (train_fraction < 0.0 || validation_fraction < 0.0 || train_fraction + validation_fraction > 1.0) {
    throw std::invalid_argument("class partition fractions must be nonnegative and sum to at most 1");
  }
}

std::vector<double> synthetic_means(const SyntheticSpec& spec) {
  spec.validate();
  std::seed_seq mean_seed{spec.seed, std::uint64_t{0x6d65616e}};
  std::mt19937_64 rng(mean_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Start where a random pair is about `separation` apart, widen on repeated rejection.
  double spread = spec.separation / std::sqrt(2.0 * static_cast<double>(spec.dim));
  const double min_sq = spec.separation * spec.separation;

  std::vector<double> means;
  means.reserve(spec.n_classes * spec.dim);
  std::vector<double> candidate(spec.dim);
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 0 && attempt % 200 == 0) spread *= 1.05;
      for (double& v : candidate) v = spread * normal(rng);
      bool ok = true;
      for (std::size_t j = 0; j < c && ok; ++j) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < spec.dim; ++k) {
          const double diff = candidate[k] - means[j * spec.dim + k];
          d2 += diff * diff;
        }
        ok = d2 >= min_sq;
      }
      if (ok) break;
    }
    means.insert(means.end(), candidate.begin(), candidate.end());
  }
  return means;
}

Dataset gen_synthetic(const SyntheticSpec& spec) {
  const std::vector<double> means = synthetic_means(spec);
  std::seed_seq sample_seed{spec.seed, std::uint64_t{0x73616d70}};
  std::mt19937_64 rng(sample_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(spec.n_classes)));
  const auto n_val =
      static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(spec.n_classes)));

  std::vector<ClassData> classes(spec.n_classes);
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    char name[32];
    std::snprintf(name, sizeof name, "class_%04zu", c);
    classes[c].name = name;
    classes[c].partition = c < n_train ? Partition::train : (c < n_train + n_val ? Partition::validation : Partition::test);
    classes[c].values.resize(spec.samples_per_class * spec.dim);
    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
      for (std::size_t k = 0; k < spec.dim; ++k) {
        classes[c].values[s * spec.dim + k] = means[c * spec.dim + k] + spec.cluster_std * normal(rng);
      }
    }
    classes[c].labeled.assign(spec.samples_per_class, 1);
  }
  Dataset full({spec.dim}, std::move(classes));
  return make_split(full, spec.labeled_fraction, spec.seed ^ 0x73706c6974ull);
}

}  // namespace sala::data
