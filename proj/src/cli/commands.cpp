// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sala/data/dataset_io.hpp"
#include "sala/data/synthetic.hpp"
#include "sala/trainer/evaluate.hpp"
#include "sala/trainer/model_io.hpp"
#include "sala/trainer/train.hpp"
#include "sala/util/binary_io.hpp"

namespace sala::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flags shared by train, eval and ablate. Only flags given on the command
// line override the config file.
struct Overrides {
  std::string config_path;
  std::size_t ways = 0, shots = 0, query = 0, unlabeled = 0, distractors = 0;
  double eta = 0, lr = 0;
  std::size_t reduction_ratio = 0, m0 = 0, episodes = 0, eval_every = 0, validation_episodes = 0;
  std::size_t test_episodes = 0, threads = 0;
  std::uint64_t seed = 0;
  std::string mode, embedding;
  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_episode_flags(CLI::App& cmd, Overrides& o) {
  o.opts["ways"] = cmd.add_option("--ways", o.ways, "Classes per episode")->check(CLI::PositiveNumber);
  o.opts["shots"] = cmd.add_option("--shots", o.shots, "Labeled support samples per class")->check(CLI::PositiveNumber);
  o.opts["query"] = cmd.add_option("--query", o.query, "Query samples per class")->check(CLI::PositiveNumber);
  o.opts["unlabeled"] =
      cmd.add_option("--unlabeled-per-class", o.unlabeled, "Unlabeled samples per class")->check(CLI::PositiveNumber);
  o.opts["distractors"] = cmd.add_option("--distractors", o.distractors, "Distractor classes in the unlabeled set");
  o.opts["m0"] = cmd.add_option("--m0", o.m0, "Cap on selected unlabeled samples");
  o.opts["mode"] = cmd.add_option("--mode", o.mode, "sala, soft-kmeans, supervised, tm-only or pns-only")
                       ->check(CLI::IsMember({"sala", "soft-kmeans", "supervised", "tm-only", "pns-only"}));
  o.opts["seed"] = cmd.add_option("--seed", o.seed, "Random seed");
  o.opts["threads"] = cmd.add_option("--threads", o.threads, "Evaluation worker threads")->check(CLI::PositiveNumber);
}

void add_training_flags(CLI::App& cmd, Overrides& o) {
  o.opts["config"] = cmd.add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  add_episode_flags(cmd, o);
  o.opts["eta"] = cmd.add_option("--eta", o.eta, "Selection schedule steepness")->check(CLI::PositiveNumber);
  o.opts["reduction_ratio"] =
      cmd.add_option("--reduction-ratio", o.reduction_ratio, "SE reduction ratio")->check(CLI::PositiveNumber);
  o.opts["episodes"] = cmd.add_option("--episodes", o.episodes, "Training episodes");
  o.opts["eval_every"] =
      cmd.add_option("--eval-every", o.eval_every, "Validation cadence in episodes")->check(CLI::PositiveNumber);
  o.opts["validation_episodes"] = cmd.add_option("--validation-episodes", o.validation_episodes,
                                                 "Episodes per validation pass")
                                      ->check(CLI::PositiveNumber);
  o.opts["test_episodes"] =
      cmd.add_option("--test-episodes", o.test_episodes, "Episodes in the test report")->check(CLI::PositiveNumber);
  o.opts["lr"] = cmd.add_option("--lr", o.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  o.opts["embedding"] =
      cmd.add_option("--embedding", o.embedding, "mlp or convnet4")->check(CLI::IsMember({"mlp", "convnet4"}));
}

void apply_episode_overrides(const Overrides& o, data::EpisodeSpec& s) {
  if (o.given("ways")) s.ways = o.ways;
  if (o.given("shots")) s.shots = o.shots;
  if (o.given("query")) s.queries = o.query;
  if (o.given("unlabeled")) s.unlabeled_per_class = o.unlabeled;
  if (o.given("distractors")) s.distractors = o.distractors;
}

trainer::TrainConfig training_config(const Overrides& o) {
  trainer::TrainConfig c = o.given("config") ? trainer::load_config(o.config_path) : trainer::TrainConfig{};
  for (auto* spec : {&c.train_episode, &c.validation_episode, &c.test_episode}) apply_episode_overrides(o, *spec);
  if (o.given("m0")) c.schedule.max_selected = o.m0;
  if (o.given("mode")) c.mode = core::run_mode_from_string(o.mode);
  if (o.given("seed")) c.seed = o.seed;
  if (o.given("threads")) c.threads = o.threads;
  if (o.given("eta")) c.schedule.eta = o.eta;
  if (o.given("reduction_ratio")) c.model.reduction_ratio = o.reduction_ratio;
  if (o.given("episodes")) c.total_episodes = o.episodes;
  if (o.given("eval_every")) c.eval_every = o.eval_every;
  if (o.given("validation_episodes")) c.validation_episodes = o.validation_episodes;
  if (o.given("test_episodes")) c.test_episodes = o.test_episodes;
  if (o.given("lr")) c.learning_rate = o.lr;
  if (o.given("embedding")) c.model.embedding = models::embedding_kind_from_string(o.embedding);
  if (c.eval_every > c.total_episodes && c.total_episodes > 0 && !o.given("eval_every")) {
    c.eval_every = c.total_episodes;
  }
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  io::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string csv_header(const std::string& config_echo, std::uint64_t seed) {
  return "# config_echo: " + config_echo + "\n# seed: " + std::to_string(seed) + "\n";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string curve_csv(const trainer::TrainResult& r) {
  std::string out = csv_header(trainer::config_to_json(r.config), r.config.seed) + "episode,val_acc\n";
  for (const auto& p : r.curve) out += std::to_string(p.episode) + "," + fixed(p.accuracy, 6) + "\n";
  return out;
}

std::string jsonl(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

// ---- gen-synth --------------------------------------------------------------

struct GenSynthArgs {
  data::SyntheticSpec spec;
  std::string out;
};

int cmd_gen_synth(const GenSynthArgs& a, std::ostream& out) {
  data::Dataset ds = data::gen_synthetic(a.spec);
  fs::create_directories(a.out);
  data::save_dataset(a.out, ds);
  json echo = {{"classes", a.spec.n_classes},
               {"dim", a.spec.dim},
               {"std", a.spec.cluster_std},
               {"separation", a.spec.separation},
               {"samples_per_class", a.spec.samples_per_class},
               {"labeled_fraction", a.spec.labeled_fraction},
               {"train_fraction", a.spec.train_fraction},
               {"validation_fraction", a.spec.validation_fraction},
               {"seed", a.spec.seed}};
  json manifest = {{"command", "gen-synth"}, {"config_echo", echo.dump()}, {"seed", a.spec.seed}};
  write_text(fs::path(a.out) / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << ds.class_count() << " classes of " << a.spec.samples_per_class << " samples to " << a.out << "\n";
  return 0;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  Overrides o;
  std::string data, out;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  trainer::TrainConfig config = training_config(a.o);
  data::Dataset ds = data::load_dataset(a.data);
  fs::create_directories(a.out);
  trainer::TrainResult r = trainer::train(config, ds, [&](const std::string& line) {
    if (!a.quiet && line.find("val_acc") != std::string::npos) out << line << "\n";
  });
  const fs::path dir(a.out);
  write_text(dir / "config.json", trainer::config_to_json(r.config, 2) + "\n");
  const json header = {{"config_echo", trainer::config_to_json(r.config)}, {"seed", r.config.seed}};
  write_text(dir / "metrics.jsonl", header.dump() + "\n" + jsonl(r.log));
  write_text(dir / "curve.csv", curve_csv(r));
  models::save_checkpoint(dir / "best.ckpt", r.best);
  models::save_checkpoint(dir / "final.ckpt", r.final);
  out << "best validation accuracy "
      << (r.best_val_acc ? fixed(*r.best_val_acc, 4) + " at episode " + std::to_string(*r.best_episode) : "n/a")
      << "; checkpoint " << (dir / "best.ckpt").string() << "\n";
  return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  Overrides o;
  std::string data, checkpoint, out;
  std::size_t episodes = 0;
  CLI::Option* episodes_opt = nullptr;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  models::Checkpoint ck = models::load_checkpoint(a.checkpoint);
  trainer::RestoredModel restored = trainer::restore_model(ck);
  data::Dataset ds = data::load_dataset(a.data);
  trainer::TrainConfig config = trainer::resolve_config(restored.config, ds);
  apply_episode_overrides(a.o, config.test_episode);
  if (a.o.given("m0")) config.schedule.max_selected = a.o.m0;
  if (a.o.given("mode")) config.mode = core::run_mode_from_string(a.o.mode);
  config.test_episode.validate();

  trainer::EvalSettings settings;
  settings.episodes = a.episodes_opt->count() ? a.episodes : config.test_episodes;
  settings.seed = a.o.given("seed") ? a.o.seed : config.seed;
  settings.threads = a.o.given("threads") ? a.o.threads : config.threads;
  trainer::EvalReport report = trainer::evaluate_model(restored.model, config, ds, config.test_episode, settings);
  report.checkpoint_hash = models::content_hash(models::encode_checkpoint(ck));

  json j = json::parse(trainer::report_to_json(report));
  j["seed"] = settings.seed;
  const std::string text = j.dump(2) + "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_text(fs::path(a.out) / "report.json", text);
  }
  out << text;
  return 0;
}

// ---- ablate -----------------------------------------------------------------

struct AblateArgs {
  Overrides o;
  std::string data, out;
};

int cmd_ablate(const AblateArgs& a, std::ostream& out) {
  trainer::TrainConfig base = training_config(a.o);
  data::Dataset ds = data::load_dataset(a.data);
  fs::create_directories(a.out);
  const std::string echo = trainer::config_to_json(trainer::resolve_config(base, ds));

  std::string table = csv_header(echo, base.seed) + "tm,pns,mean_acc,ci95,episodes,cell\n";
  std::string curves = csv_header(echo, base.seed) + "tm,pns,episode,val_acc\n";
  for (int tm = 0; tm <= 1; ++tm) {
    for (int pns = 0; pns <= 1; ++pns) {
      trainer::TrainConfig c = base;
      c.mode = core::RunMode{tm == 1, pns == 1, true};
      trainer::TrainResult r = trainer::train(c, ds);
      trainer::EvalSettings settings;
      settings.episodes = c.test_episodes;
      settings.seed = c.seed;
      settings.threads = c.threads;
      trainer::RestoredModel best = trainer::restore_model(r.best);
      trainer::EvalReport rep = trainer::evaluate_model(best.model, r.config, ds, r.config.test_episode, settings);
      const std::string cell = fixed(100.0 * rep.mean_acc, 2) + " +- " + fixed(100.0 * rep.ci95, 2);
      table += std::to_string(tm) + "," + std::to_string(pns) + "," + fixed(rep.mean_acc, 6) + "," +
               fixed(rep.ci95, 6) + "," + std::to_string(rep.episodes) + "," + cell + "\n";
      for (const auto& p : r.curve) {
        curves += std::to_string(tm) + "," + std::to_string(pns) + "," + std::to_string(p.episode) + "," +
                  fixed(p.accuracy, 6) + "\n";
      }
      out << "TM=" << tm << " PNS=" << pns << ": " << cell << "\n";
    }
  }
  write_text(fs::path(a.out) / "ablation.csv", table);
  write_text(fs::path(a.out) / "ablation_curves.csv", curves);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-supervised few-shot classification with a task-adaptive metric", "sala"};
  app.require_subcommand(1);

  GenSynthArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "Generate a Gaussian-cluster dataset");
  gen_cmd->add_option("--classes", gen.spec.n_classes, "Number of classes")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--dim", gen.spec.dim, "Sample dimension")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--samples-per-class", gen.spec.samples_per_class, "Samples per class")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--separation", gen.spec.separation, "Minimum distance between class means")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--std", gen.spec.cluster_std, "Per-coordinate cluster spread")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--labeled-fraction", gen.spec.labeled_fraction, "Labeled share of each class");
  gen_cmd->add_option("--train-fraction", gen.spec.train_fraction, "Share of classes used for training");
  gen_cmd->add_option("--validation-fraction", gen.spec.validation_fraction, "Share of classes used for validation");
  gen_cmd->add_option("--seed", gen.spec.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model and keep the best validation checkpoint");
  add_training_flags(*train_cmd, tr.o);
  train_cmd->add_option("--data", tr.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--out", tr.out, "Output directory")->required();
  train_cmd->add_flag("--quiet", tr.quiet, "Do not print validation records");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint over test episodes");
  add_episode_flags(*eval_cmd, ev.o);
  eval_cmd->add_option("--data", ev.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--out", ev.out, "Directory for report.json");
  ev.episodes_opt = eval_cmd->add_option("--episodes", ev.episodes, "Test episodes")->check(CLI::PositiveNumber);

  AblateArgs ab;
  auto* ablate_cmd = app.add_subcommand("ablate", "Train and test the four TM x PNS cells");
  add_training_flags(*ablate_cmd, ab.o);
  ablate_cmd->add_option("--data", ab.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  ablate_cmd->add_option("--out", ab.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    err << "error: " << e.what() << "\n\n" << target->help();
    return 2;
  }

  try {
    if (*gen_cmd) return cmd_gen_synth(gen, out);
    if (*train_cmd) return cmd_train(tr, out);
    if (*eval_cmd) return cmd_eval(ev, out);
    return cmd_ablate(ab, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sala::cli
