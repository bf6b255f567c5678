// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/trainer/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "sala/core/episode_runner.hpp"
#include "sala/trainer/model_io.hpp"

namespace sala::trainer {

namespace {

double normalization_error(const ad::Tensor& probabilities) {
  const std::size_t rows = probabilities.dim(0);
  const std::size_t cols = probabilities.dim(1);
  auto p = probabilities.data();
  double worst = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += p[r * cols + c];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

EpisodeOutcome score_episode(models::SalaModel& model, const data::Dataset& dataset, const EvalPlan& plan,
                             std::size_t k) {
  data::EpisodeSpec spec = plan.spec;
  spec.seed = derive_seed(plan.seed, plan.stream, k);
  data::Episode ep = data::sample_episode(dataset, spec, plan.partition);
  core::EpisodeResult r =
      core::run_episode(model, ep.task, plan.schedule, plan.schedule_index, plan.mode, ad::NormMode::eval);
  EpisodeOutcome out;
  out.accuracy = r.metrics.query_accuracy;
  out.selected = r.metrics.selected;
  out.pseudo_precision = core::pseudo_label_precision(r, ep.truth);
  if (r.table) out.max_normalization_error = normalization_error(r.table->probabilities);
  return out;
}

}  // namespace

std::vector<EpisodeOutcome> run_evaluation(models::SalaModel& model, const data::Dataset& dataset,
                                           const EvalPlan& plan) {
  std::vector<EpisodeOutcome> outcomes(plan.episodes);
  const std::size_t workers = std::max<std::size_t>(1, std::min(plan.threads, plan.episodes));
  if (workers == 1) {
    for (std::size_t k = 0; k < plan.episodes; ++k) outcomes[k] = score_episode(model, dataset, plan, k);
    return outcomes;
  }
  std::vector<std::exception_ptr> errors(plan.episodes);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < plan.episodes; k += workers) {
        try {
          outcomes[k] = score_episode(model, dataset, plan, k);
        } catch (...) {
          errors[k] = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outcomes;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

EvalReport evaluate_model(models::SalaModel& model, const TrainConfig& config, const data::Dataset& dataset,
                          const data::EpisodeSpec& spec, const EvalSettings& settings) {
  if (settings.episodes == 0) throw std::invalid_argument("evaluate: episode count must be positive");
  EvalPlan plan;
  plan.spec = spec;
  plan.partition = settings.partition;
  plan.seed = settings.seed;
  plan.stream = SeedStream::test;
  plan.episodes = settings.episodes;
  plan.schedule = {config.schedule.eta, config.max_selected(spec), 2};
  plan.schedule_index = 1;  // t = 1
  plan.mode = settings.mode.value_or(config.mode);
  plan.threads = settings.threads;
  auto outcomes = run_evaluation(model, dataset, plan);

  EvalReport report;
  report.episodes = outcomes.size();
  std::vector<double> precisions;
  for (const auto& o : outcomes) {
    report.accuracies.push_back(o.accuracy);
    if (o.pseudo_precision) precisions.push_back(*o.pseudo_precision);
  }
  const Summary s = summarize(report.accuracies);
  report.mean_acc = s.mean;
  report.ci95 = s.ci95;
  if (!precisions.empty()) report.mean_pseudo_precision = summarize(precisions).mean;
  report.config_echo = config_to_json(config);
  return report;
}

EvalReport evaluate(const models::Checkpoint& checkpoint, const data::Dataset& dataset, const data::EpisodeSpec& spec,
                    const EvalSettings& settings) {
  RestoredModel restored = restore_model(checkpoint);
  resolve_config(restored.config, dataset);
  EvalReport report = evaluate_model(restored.model, restored.config, dataset, spec, settings);
  report.config_echo = checkpoint.config_echo;
  report.checkpoint_hash = models::content_hash(models::encode_checkpoint(checkpoint));
  return report;
}

std::string report_to_json(const EvalReport& report, int indent) {
  nlohmann::json j = {{"mean_acc", report.mean_acc},
                      {"ci95", report.ci95},
                      {"episodes", report.episodes},
                      {"config_echo", report.config_echo},
                      {"checkpoint_hash", report.checkpoint_hash}};
  j["mean_pseudo_precision"] =
      report.mean_pseudo_precision ? nlohmann::json(*report.mean_pseudo_precision) : nlohmann::json(nullptr);
  return j.dump(indent);
}

}  // namespace sala::trainer
