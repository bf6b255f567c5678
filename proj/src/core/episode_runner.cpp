// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/core/episode_runner.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "sala/core/metric.hpp"

namespace sala::core {

namespace {

std::vector<std::size_t> index_range(std::size_t begin, std::size_t count) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), begin);
  return idx;
}

void check_task(const data::TaskData& task) {
  if (task.ways == 0) throw std::invalid_argument("run_episode: task has no classes");
  if (task.support.count != task.support_labels.size() || task.query.count != task.query_labels.size()) {
    throw std::invalid_argument("run_episode: label counts do not match sample counts");
  }
  if (task.query.count == 0) throw std::invalid_argument("run_episode: task has no queries");
  for (const data::SampleBatch* b : {&task.query, &task.unlabeled}) {
    if (b->count > 0 && b->sample_shape != task.support.sample_shape) {
      throw std::invalid_argument("run_episode: sample shapes differ between task sets");
    }
  }
}

std::vector<std::size_t> nearest(const ad::Tensor& table) {
  const std::size_t m = table.dim(0);
  const std::size_t n = table.dim(1);
  auto v = table.data();
  std::vector<std::size_t> best(m, 0);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t i = 1; i < n; ++i) {
      if (v[u * n + i] < v[u * n + best[u]]) best[u] = i;
    }
  }
  return best;
}

}  // namespace

ad::Tensor to_tensor(const data::SampleBatch& batch) {
  ad::Shape shape{batch.count};
  shape.insert(shape.end(), batch.sample_shape.begin(), batch.sample_shape.end());
  return ad::Tensor::from(std::move(shape), batch.values);
}

ad::Tensor episode_loss(const models::PrototypeSet& refined, const models::TaskWeights* weights,
                        const ad::Tensor& query_embeddings, std::span<const std::size_t> query_labels,
                        const RunMode& mode) {
  if (query_embeddings.rank() != 2 || query_embeddings.dim(0) != query_labels.size()) {
    throw std::invalid_argument("episode_loss: " + std::to_string(query_labels.size()) + " labels for queries " +
                                ad::shape_str(query_embeddings.shape()));
  }
  const bool weighted = mode.use_task_metric && weights != nullptr;
  ad::Tensor dist = distance_table(query_embeddings, refined.centers, weighted ? weights->alpha : ad::Tensor{});
  ad::Tensor log_p = ad::log_softmax_rows(ad::scale(dist, -1.0));
  return ad::scale(ad::sum(ad::pick(log_p, query_labels)), -1.0);
}

EpisodeResult run_episode(models::SalaModel& model, const data::TaskData& task, const SelectionSchedule& schedule,
                          std::size_t episode_index, const RunMode& mode, ad::NormMode norm) {
  check_task(task);
  const std::size_t ns = task.support.count;
  const std::size_t nq = task.query.count;
  const bool with_unlabeled = mode.use_unlabeled && task.unlabeled.count > 0;
  const std::size_t nu = with_unlabeled ? task.unlabeled.count : 0;

  data::SampleBatch joint{task.support.sample_shape, ns + nu + nq, task.support.values};
  if (with_unlabeled) {
    joint.values.insert(joint.values.end(), task.unlabeled.values.begin(), task.unlabeled.values.end());
  }
  joint.values.insert(joint.values.end(), task.query.values.begin(), task.query.values.end());
  ad::Tensor emb = model.embedding.embed(to_tensor(joint), norm);

  EpisodeResult r;
  r.support_embeddings = ad::rows(emb, index_range(0, ns));
  if (with_unlabeled) r.unlabeled_embeddings = ad::rows(emb, index_range(ns, nu));
  r.query_embeddings = ad::rows(emb, index_range(ns + nu, nq));

  r.prototypes = models::compute_prototypes(r.support_embeddings, task.support_labels, task.ways);
  if (mode.use_task_metric) r.weights = models::generate_task_weights(model.se, r.prototypes);
  const models::TaskWeights* weights = r.weights ? &*r.weights : nullptr;

  if (with_unlabeled) {
    r.table = pseudo_label(r.prototypes, weights, r.unlabeled_embeddings, mode);
    const std::size_t n = mode.use_progressive_selection ? selection_count(schedule, episode_index, nu) : nu;
    r.selected = select_top_n(*r.table, n);
    r.refined = refine_prototypes(r.support_embeddings, task.support_labels, task.ways, *r.table, r.selected,
                                  r.unlabeled_embeddings);
    double total = 0.0;
    for (double d : r.table->best_distance) total += d;
    r.metrics.mean_best_distance = total / static_cast<double>(nu);
  } else {
    r.refined = r.prototypes;
  }

  r.loss = episode_loss(r.refined, weights, r.query_embeddings, task.query_labels, mode);

  const bool weighted = mode.use_task_metric && weights != nullptr;
  r.query_predictions =
      nearest(distance_table(r.query_embeddings.detach(), r.refined.centers.detach(),
                             weighted ? weights->alpha.detach() : ad::Tensor{}));
  std::size_t correct = 0;
  for (std::size_t q = 0; q < nq; ++q) correct += (r.query_predictions[q] == task.query_labels[q]) ? 1 : 0;
  r.metrics.query_accuracy = static_cast<double>(correct) / static_cast<double>(nq);
  r.metrics.loss = r.loss.item();
  r.metrics.selected = r.selected.size();
  return r;
}

std::optional<double> pseudo_label_precision(const EpisodeResult& result, const data::UnlabeledTruth& truth) {
  if (!result.table || result.selected.empty()) return std::nullopt;
  if (truth.episode_class.size() != result.table->size()) {
    throw std::invalid_argument("pseudo_label_precision: truth covers " + std::to_string(truth.episode_class.size()) +
                                " samples, table has " + std::to_string(result.table->size()));
  }
  std::size_t hits = 0;
  for (std::size_t u : result.selected) {
    const int cls = truth.episode_class[u];
    if (cls != data::UnlabeledTruth::kDistractor && static_cast<std::size_t>(cls) == result.table->best_class[u]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(result.selected.size());
}

}  // namespace sala::core
