// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/trainer/train.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "sala/autodiff/tape.hpp"
#include "sala/core/episode_runner.hpp"
#include "sala/trainer/adam.hpp"
#include "sala/trainer/evaluate.hpp"
#include "sala/trainer/model_io.hpp"

namespace sala::trainer {

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

void check_partition(const data::Dataset& dataset, const data::EpisodeSpec& spec, data::Partition p) {
  // Surfaces sampling preconditions before any training work is done.
  data::EpisodeSpec probe = spec;
  probe.seed = 0;
  data::sample_episode(dataset, probe, p);
}

}  // namespace

TrainResult train(const TrainConfig& input, const data::Dataset& dataset, const LogSink& sink) {
  input.validate();
  TrainResult result;
  result.config = resolve_config(input, dataset);
  const TrainConfig& config = result.config;

  auto emit = [&](const nlohmann::json& record) {
    result.log.push_back(record.dump());
    if (sink) sink(result.log.back());
  };
  models::SalaModel model = build_model(config, derive_seed(config.seed, SeedStream::init, 0));
  result.best = make_checkpoint(model, config);
  if (config.total_episodes == 0) {
    result.final = result.best;
    return result;
  }
  check_partition(dataset, config.train_episode, data::Partition::train);
  check_partition(dataset, config.validation_episode, data::Partition::validation);

  std::vector<models::Parameter> params = model.parameters();
  AdamState adam;
  const core::SelectionSchedule schedule = config.training_schedule();

  for (std::size_t i = 0; i < config.total_episodes; ++i) {
    data::EpisodeSpec spec = config.train_episode;
    spec.seed = derive_seed(config.seed, SeedStream::train, i);
    data::Episode ep = data::sample_episode(dataset, spec, data::Partition::train);

    const std::string where = " at training episode " + std::to_string(i);
    core::EpisodeResult r;
    try {
      ad::Tape tape;
      ad::TapeScope scope(tape);
      r = core::run_episode(model, ep.task, schedule, i, config.mode, ad::NormMode::train);
      if (!std::isfinite(r.metrics.loss)) throw std::runtime_error("non-finite loss");
      tape.backward(r.loss);
      adam_step(params, adam, config.learning_rate, config.adam);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(e.what()) + where);
    }

    emit({{"episode", i},
          {"tm", config.mode.use_task_metric},
          {"pns", config.mode.use_progressive_selection},
          {"unlabeled", config.mode.use_unlabeled},
          {"n", r.metrics.selected},
          {"query_acc", r.metrics.query_accuracy},
          {"loss", r.metrics.loss},
          {"pseudo_precision", optional_number(core::pseudo_label_precision(r, ep.truth))},
          {"mean_best_distance", optional_number(r.metrics.mean_best_distance)}});

    const bool last = i + 1 == config.total_episodes;
    if ((i + 1) % config.eval_every != 0 && !last) continue;

    EvalPlan plan;
    plan.spec = config.validation_episode;
    plan.partition = data::Partition::validation;
    plan.seed = config.seed;
    plan.stream = SeedStream::validation;
    plan.episodes = config.validation_episodes;
    plan.schedule = {schedule.eta, config.max_selected(config.validation_episode), schedule.total_episodes};
    plan.schedule_index = i;
    plan.mode = config.mode;
    plan.threads = config.threads;
    std::vector<double> acc;
    for (const auto& o : run_evaluation(model, dataset, plan)) acc.push_back(o.accuracy);
    const double val_acc = summarize(acc).mean;
    result.curve.push_back({i, val_acc});
    emit({{"episode", i}, {"val_acc", val_acc}});
    if (!result.best_val_acc || val_acc > *result.best_val_acc) {
      result.best_val_acc = val_acc;
      result.best_episode = i;
      result.best = make_checkpoint(model, config);
    }
  }
  result.final = make_checkpoint(model, config);
  return result;
}

}  // namespace sala::trainer
