// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "sala/autodiff/ops.hpp"
#include "sala/autodiff/tape.hpp"
#include "sala/data/synthetic.hpp"
#include "sala/trainer/adam.hpp"
#include "sala/trainer/config.hpp"
#include "sala/trainer/evaluate.hpp"
#include "sala/trainer/model_io.hpp"
#include "sala/trainer/train.hpp"

using namespace sala;
using ad::Tensor;
using trainer::TrainConfig;

namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

data::Dataset separable(std::uint64_t seed = 3) {
  data::SyntheticSpec s;
  s.n_classes = 40;
  s.dim = 16;
  s.separation = 20.0;
  s.cluster_std = 1.0;
  s.samples_per_class = 60;
  s.seed = seed;
  return data::gen_synthetic(s);
}

TrainConfig small_config(std::size_t episodes) {
  TrainConfig c;
  c.total_episodes = episodes;
  c.eval_every = std::max<std::size_t>(1, episodes / 4);
  c.validation_episodes = 40;
  c.seed = 11;
  for (auto* s : {&c.train_episode, &c.validation_episode, &c.test_episode}) {
    s->ways = 5;
    s->shots = 1;
    s->queries = 5;
    s->unlabeled_per_class = 5;
  }
  return c;
}

}  // namespace

// ---- Adam -----------------------------------------------------------------

TEST(Adam, FirstStepMatchesHandRolledUpdate) {
  std::vector<double> w0{0.5, -1.0, 2.0, 0.0};
  std::vector<double> g{0.3, -2.0, 1e-4, 5.0};
  std::vector<models::Parameter> params{{"w", Tensor::from({4}, w0, true)}};
  std::copy(g.begin(), g.end(), params[0].value.mutable_grad().begin());
  trainer::AdamState state;
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  trainer::adam_step(params, state, lr);
  for (std::size_t i = 0; i < 4; ++i) {
    const double m = (1 - b1) * g[i];
    const double v = (1 - b2) * g[i] * g[i];
    const double m_hat = m / (1 - b1);
    const double v_hat = v / (1 - b2);
    EXPECT_NEAR(params[0].value.at(i), w0[i] - lr * m_hat / (std::sqrt(v_hat) + eps), 1e-12);
    EXPECT_EQ(params[0].value.grad()[i], 0.0);
  }
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, ZeroGradientLeavesParametersButCountsStep) {
  std::vector<models::Parameter> params{{"w", Tensor::from({3}, {1, 2, 3}, true)}};
  trainer::AdamState state;
  trainer::adam_step(params, state, 0.1);
  trainer::adam_step(params, state, 0.1);
  EXPECT_EQ(params[0].value.at(0), 1.0);
  EXPECT_EQ(params[0].value.at(2), 3.0);
  EXPECT_EQ(state.step, 2u);
}

TEST(Adam, ConvergesOnScalarQuadratic) {
  std::vector<models::Parameter> params{{"x", Tensor::from({1}, {0.0}, true)}};
  trainer::AdamState state;
  double prev_gap = 3.0;
  for (int step = 0; step < 400; ++step) {
    ad::Tape tape;
    ad::TapeScope scope(tape);
    Tensor diff = ad::sub(params[0].value, Tensor::from({1}, {3.0}));
    tape.backward(ad::sum(ad::mul(diff, diff)));
    trainer::adam_step(params, state, 0.05);
    if (step % 50 == 49) {
      const double gap = std::abs(params[0].value.at(0) - 3.0);
      EXPECT_LT(gap, prev_gap);
      prev_gap = gap;
    }
  }
  EXPECT_NEAR(params[0].value.at(0), 3.0, 0.05);
}

TEST(Adam, NonFiniteGradientNamesParameterAndChangesNothing) {
  std::vector<models::Parameter> params{{"embed.fc0.weight", Tensor::from({2}, {1, 2}, true)},
                                        {"se.reduce.bias", Tensor::from({1}, {4}, true)}};
  params[0].value.mutable_grad()[0] = 1.0;
  params[1].value.mutable_grad()[0] = NAN;
  trainer::AdamState state;
  auto msg = error_of([&] { trainer::adam_step(params, state, 0.1); });
  EXPECT_NE(msg.find("se.reduce.bias"), std::string::npos) << msg;
  EXPECT_EQ(params[0].value.at(0), 1.0);
  EXPECT_EQ(state.step, 0u);
}

// ---- config ---------------------------------------------------------------

TEST(Config, JsonRoundTripPreservesEverything) {
  TrainConfig c = small_config(100);
  c.mode = core::RunMode::soft_kmeans();
  c.schedule.max_selected = 12;
  c.schedule.eta = 2.5;
  c.model.embedding = models::EmbeddingKind::convnet4;
  c.model.input_shape = {1, 28, 28};
  c.seed = 0xffffffffffffffffull;
  c.test_episode.distractors = 3;
  EXPECT_EQ(trainer::config_from_json(trainer::config_to_json(c)), c);
  EXPECT_EQ(trainer::config_from_json(trainer::config_to_json(c, 2)), c);
}

TEST(Config, DefaultsFollowTrainingProtocol) {
  TrainConfig c;
  EXPECT_EQ(c.learning_rate, 1e-3);
  EXPECT_EQ(c.eval_every, 2500u);
  EXPECT_EQ(c.test_episodes, 1000u);
  EXPECT_EQ(c.adam.beta1, 0.9);
  EXPECT_EQ(c.adam.beta2, 0.999);
  EXPECT_EQ(c.adam.eps, 1e-8);
  EXPECT_EQ(trainer::config_from_json("{}"), c);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, UnknownKeysAreRejectedWithPath) {
  EXPECT_NE(error_of([] { trainer::config_from_json(R"({"learning_rat": 0.1})"); }).find("learning_rat"),
            std::string::npos);
  EXPECT_NE(error_of([] { trainer::config_from_json(R"({"episodes": {"train": {"way": 5}}})"); })
                .find("episodes.train.way"),
            std::string::npos);
  EXPECT_THROW(trainer::config_from_json(R"({"model": {"pooling": "strict"}})"), std::invalid_argument);
}

TEST(Config, TypeErrorsAreRejected) {
  EXPECT_THROW(trainer::config_from_json(R"({"total_episodes": -5})"), std::invalid_argument);
  EXPECT_THROW(trainer::config_from_json(R"({"learning_rate": "fast"})"), std::invalid_argument);
  EXPECT_THROW(trainer::config_from_json(R"({"mode": "kmeans"})"), std::invalid_argument);
  EXPECT_THROW(trainer::config_from_json("{"), std::invalid_argument);
  EXPECT_EQ(trainer::config_from_json(R"({"mode": "supervised"})").mode, core::RunMode::supervised());
}

TEST(Config, ValidationCatchesBadValues) {
  TrainConfig c = small_config(10);
  c.eval_every = 11;
  EXPECT_NE(error_of([&] { c.validate(); }).find("eval_every"), std::string::npos);
  c = small_config(10);
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config(10);
  c.schedule.eta = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config(10);
  c.train_episode.ways = 0;
  EXPECT_NE(error_of([&] { c.validate(); }).find("episodes.train"), std::string::npos);
}

TEST(Config, SelectionCapDependsOnDistractors) {
  TrainConfig c;
  data::EpisodeSpec s;
  EXPECT_EQ(c.max_selected(s), 75u);
  s.distractors = 5;
  EXPECT_EQ(c.max_selected(s), 75u);  // (5 + 5) * 15 / 2
  s.distractors = 1;
  EXPECT_EQ(c.max_selected(s), 45u);
  c.schedule.max_selected = 7;
  EXPECT_EQ(c.max_selected(s), 7u);
}

TEST(Config, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (auto stream : {trainer::SeedStream::train, trainer::SeedStream::validation, trainer::SeedStream::test}) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(trainer::derive_seed(5, stream, i));
  }
  EXPECT_EQ(seen.size(), 3000u);
  EXPECT_EQ(trainer::derive_seed(5, trainer::SeedStream::test, 9), trainer::derive_seed(5, trainer::SeedStream::test, 9));
}

// ---- model io -------------------------------------------------------------

TEST(ModelIo, CheckpointRestoresTheSameFunction) {
  data::Dataset ds = separable();
  TrainConfig c = trainer::resolve_config(small_config(10), ds);
  auto model = trainer::build_model(c, 42);
  auto restored = trainer::restore_model(trainer::make_checkpoint(model, c));
  EXPECT_EQ(restored.config, c);
  Tensor x = Tensor::from({2, 16}, std::vector<double>(32, 0.7));
  auto a = model.embedding.embed(x, ad::NormMode::eval);
  auto b = restored.model.embedding.embed(x, ad::NormMode::eval);
  EXPECT_EQ(std::vector<double>(a.data().begin(), a.data().end()), std::vector<double>(b.data().begin(), b.data().end()));
}

TEST(ModelIo, InputShapeMustMatchDataset) {
  data::Dataset ds = separable();
  TrainConfig c = small_config(10);
  c.model.input_shape = {15};
  EXPECT_THROW(trainer::resolve_config(c, ds), std::invalid_argument);
  c.model.input_shape = {};
  c.model.embedding = models::EmbeddingKind::convnet4;
  EXPECT_THROW(trainer::build_model(trainer::resolve_config(c, ds), 0), std::invalid_argument);
}

// ---- training -------------------------------------------------------------

TEST(Train, ZeroEpisodesReturnsInitialParameters) {
  data::Dataset ds = separable();
  TrainConfig c = small_config(0);
  c.eval_every = 1;
  auto r = trainer::train(c, ds);
  EXPECT_TRUE(r.log.empty());
  EXPECT_TRUE(r.curve.empty());
  EXPECT_FALSE(r.best_val_acc.has_value());
  auto fresh = trainer::build_model(r.config, trainer::derive_seed(c.seed, trainer::SeedStream::init, 0));
  EXPECT_EQ(r.best.arrays, fresh.state());
  EXPECT_EQ(r.final, r.best);
}

TEST(Train, SeededRunsAreIdentical) {
  data::Dataset ds = separable();
  TrainConfig c = small_config(60);
  auto a = trainer::train(c, ds);
  auto b = trainer::train(c, ds);
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(models::encode_checkpoint(a.best), models::encode_checkpoint(b.best));
  EXPECT_EQ(models::encode_checkpoint(a.final), models::encode_checkpoint(b.final));
  c.seed += 1;
  EXPECT_NE(trainer::train(c, ds).log, a.log);
}

TEST(Train, LogHasOneRecordPerEpisodePlusValidation) {
  data::Dataset ds = separable();
  TrainConfig c = small_config(30);
  c.eval_every = 10;
  auto r = trainer::train(c, ds);
  EXPECT_EQ(r.log.size(), 33u);
  ASSERT_EQ(r.curve.size(), 3u);
  EXPECT_EQ(r.curve[0].episode, 9u);
  EXPECT_NE(r.log[10].find("\"val_acc\""), std::string::npos);
  for (const char* key : {"\"episode\"", "\"tm\"", "\"pns\"", "\"n\"", "\"query_acc\"", "\"loss\"",
                          "\"pseudo_precision\"", "\"mean_best_distance\""}) {
    EXPECT_NE(r.log[0].find(key), std::string::npos) << key;
  }
}

TEST(Train, ValidatesAfterFinalEpisodeEvenOffCadence) {
  data::Dataset ds = separable();
  TrainConfig c = small_config(25);
  c.eval_every = 10;
  auto r = trainer::train(c, ds);
  ASSERT_EQ(r.curve.size(), 3u);
  EXPECT_EQ(r.curve.back().episode, 24u);
}

TEST(Train, SeparableDataReachesHighValidationAccuracy) {
  data::Dataset ds = separable();
  TrainConfig c = small_config(2000);
  c.eval_every = 500;
  c.validation_episodes = 100;
  c.train_episode.queries = c.validation_episode.queries = 15;
  c.train_episode.unlabeled_per_class = c.validation_episode.unlabeled_per_class = 15;
  auto r = trainer::train(c, ds);
  ASSERT_TRUE(r.best_val_acc.has_value());
  EXPECT_GE(*r.best_val_acc, 0.95);
  for (const auto& p : r.curve) EXPECT_GE(*r.best_val_acc, p.accuracy);

  // Per-query loss over the first and last tenth of training.
  std::vector<double> losses;
  for (const auto& line : r.log) {
    auto pos = line.find("\"loss\":");
    if (pos != std::string::npos) losses.push_back(std::stod(line.substr(pos + 7)) / 75.0);
  }
  ASSERT_EQ(losses.size(), 2000u);
  double first = 0, last = 0;
  for (std::size_t i = 0; i < 200; ++i) first += losses[i] / 200, last += losses[1800 + i] / 200;
  EXPECT_LT(last, first);
  EXPECT_LT(last, std::log(5.0) * 0.1);
}

TEST(Train, NonFiniteLossAbortsWithEpisodeIndex) {
  data::SyntheticSpec s;
  s.n_classes = 40;
  s.dim = 4;
  s.samples_per_class = 40;
  s.separation = 1e160;
  data::Dataset ds = data::gen_synthetic(s);
  TrainConfig c = small_config(5);
  auto msg = error_of([&] { trainer::train(c, ds); });
  EXPECT_NE(msg.find("training episode 0"), std::string::npos) << msg;
}

TEST(Train, MissingPartitionIsReportedUpFront) {
  data::SyntheticSpec s;
  s.n_classes = 10;
  s.samples_per_class = 40;
  s.train_fraction = 0.8;
  s.validation_fraction = 0.2;
  data::Dataset ds = data::gen_synthetic(s);
  TrainConfig c = small_config(5);
  auto msg = error_of([&] { trainer::train(c, ds); });
  EXPECT_NE(msg.find("validation"), std::string::npos) << msg;
}

// ---- evaluation -----------------------------------------------------------

TEST(Evaluate, SummaryUsesNormalApproximation) {
  std::vector<double> v{0.2, 0.4, 0.6};
  auto s = trainer::summarize(v);
  EXPECT_NEAR(s.mean, 0.4, 1e-15);
  EXPECT_NEAR(s.ci95, 1.96 * 0.2 / std::sqrt(3.0), 1e-15);
  EXPECT_THROW(trainer::summarize(std::vector<double>{}), std::invalid_argument);
}

TEST(Evaluate, ReportIsDeterministicAndThreadIndependent) {
  data::Dataset ds = separable();
  auto r = trainer::train(small_config(40), ds);
  data::EpisodeSpec spec = r.config.test_episode;
  trainer::EvalSettings one{.episodes = 120, .seed = 4, .threads = 1, .mode = {}};
  trainer::EvalSettings three{.episodes = 120, .seed = 4, .threads = 3, .mode = {}};
  auto a = trainer::evaluate(r.best, ds, spec, one);
  auto b = trainer::evaluate(r.best, ds, spec, one);
  auto c = trainer::evaluate(r.best, ds, spec, three);
  EXPECT_EQ(trainer::report_to_json(a), trainer::report_to_json(b));
  EXPECT_EQ(a.accuracies, c.accuracies);
  EXPECT_EQ(a.episodes, 120u);
  EXPECT_EQ(a.checkpoint_hash, models::content_hash(models::encode_checkpoint(r.best)));
  EXPECT_EQ(a.config_echo, r.best.config_echo);
}

TEST(Evaluate, DefaultProtocolRunsOneThousandEpisodes) {
  data::Dataset ds = separable();
  TrainConfig c = trainer::resolve_config(small_config(10), ds);
  auto model = trainer::build_model(c, 1);
  auto report = trainer::evaluate(trainer::make_checkpoint(model, c), ds, c.test_episode);
  EXPECT_EQ(report.episodes, 1000u);
  EXPECT_EQ(report.accuracies.size(), 1000u);
  EXPECT_GT(report.ci95, 0.0);
}

TEST(Evaluate, EvaluationUsesFullSelection) {
  data::Dataset ds = separable();
  TrainConfig c = trainer::resolve_config(small_config(10), ds);
  auto model = trainer::build_model(c, 1);
  trainer::EvalPlan plan;
  plan.spec = c.test_episode;
  plan.episodes = 5;
  plan.schedule = {c.schedule.eta, c.max_selected(c.test_episode), 2};
  plan.schedule_index = 1;
  plan.mode = c.mode;
  for (const auto& o : trainer::run_evaluation(model, ds, plan)) {
    EXPECT_EQ(o.selected, 25u);
    EXPECT_LT(o.max_normalization_error, 1e-12);
  }
}

TEST(Evaluate, ChanceLevelWithoutSignal) {
  data::SyntheticSpec s;
  s.n_classes = 40;
  s.dim = 16;
  s.separation = 1e-6;
  s.cluster_std = 1.0;
  s.samples_per_class = 3000;  // large pool keeps sample-mean differences negligible
  data::Dataset ds = data::gen_synthetic(s);
  TrainConfig c = trainer::resolve_config(small_config(10), ds);
  auto model = trainer::build_model(c, 9);
  auto report = trainer::evaluate(trainer::make_checkpoint(model, c), ds, c.test_episode, {.episodes = 1000, .seed = 2, .threads = 1, .mode = {}});
  EXPECT_LE(std::abs(report.mean_acc - 0.2), report.ci95) << report.mean_acc << " +- " << report.ci95;
}

TEST(Evaluate, ConfidenceIntervalShrinksWithSquareRootOfEpisodes) {
  data::Dataset ds = separable();
  TrainConfig c = trainer::resolve_config(small_config(10), ds);
  auto ck = trainer::make_checkpoint(trainer::build_model(c, 3), c);
  auto small = trainer::evaluate(ck, ds, c.test_episode, {.episodes = 1000, .seed = 1, .threads = 1, .mode = {}});
  auto large = trainer::evaluate(ck, ds, c.test_episode, {.episodes = 4000, .seed = 1, .threads = 1, .mode = {}});
  EXPECT_NEAR(small.ci95 / large.ci95, 2.0, 0.2);
}
