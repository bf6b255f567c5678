// Copyright (c) 2026 The SALA Authors
// SPDX-License-Identifier: Apache-2.0

#include "sala/trainer/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sala::trainer {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

// Visits an object's keys, rejecting any not in `allowed`.
void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) config_error(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) config_error(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void read_count(const json& obj, const std::string& path, const char* key, std::size_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) config_error(join(path, key), "expected a nonnegative integer");
  out = v.get<std::size_t>();
}

void read_u64(const json& obj, const std::string& path, const char* key, std::uint64_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) config_error(join(path, key), "expected a nonnegative integer");
  out = v.get<std::uint64_t>();
}

void read_real(const json& obj, const std::string& path, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) config_error(join(path, key), "expected a number");
  out = v.get<double>();
}

void read_bool(const json& obj, const std::string& path, const char* key, bool& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_boolean()) config_error(join(path, key), "expected true or false");
  out = v.get<bool>();
}

json episode_to_json(const data::EpisodeSpec& s) {
  return {{"ways", s.ways},
          {"shots", s.shots},
          {"queries", s.queries},
          {"unlabeled_per_class", s.unlabeled_per_class},
          {"distractors", s.distractors}};
}

void episode_from_json(const json& obj, const std::string& path, data::EpisodeSpec& s) {
  check_keys(obj, path, {"ways", "shots", "queries", "unlabeled_per_class", "distractors"});
  read_count(obj, path, "ways", s.ways);
  read_count(obj, path, "shots", s.shots);
  read_count(obj, path, "queries", s.queries);
  read_count(obj, path, "unlabeled_per_class", s.unlabeled_per_class);
  read_count(obj, path, "distractors", s.distractors);
}

json mode_to_json(const core::RunMode& m) {
  return {{"task_metric", m.use_task_metric},
          {"progressive_selection", m.use_progressive_selection},
          {"use_unlabeled", m.use_unlabeled}};
}

core::RunMode mode_from_json(const json& v) {
  if (v.is_string()) {
    try {
      return core::run_mode_from_string(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      config_error("mode", e.what());
    }
  }
  core::RunMode m;
  check_keys(v, "mode", {"task_metric", "progressive_selection", "use_unlabeled"});
  read_bool(v, "mode", "task_metric", m.use_task_metric);
  read_bool(v, "mode", "progressive_selection", m.use_progressive_selection);
  read_bool(v, "mode", "use_unlabeled", m.use_unlabeled);
  return m;
}

json to_json(const TrainConfig& c) {
  json model = {{"embedding", models::to_string(c.model.embedding)},
                {"hidden", c.model.hidden},
                {"output_dim", c.model.output_dim},
                {"filters", c.model.filters},
                {"reduction_ratio", c.model.reduction_ratio},
                {"input_shape", c.model.input_shape},
                {"pooling", "floor"}};
  json schedule = {{"eta", c.schedule.eta},
                   {"max_selected", c.schedule.max_selected ? json(*c.schedule.max_selected) : json(nullptr)}};
  return {{"seed", c.seed},
          {"mode", mode_to_json(c.mode)},
          {"learning_rate", c.learning_rate},
          {"total_episodes", c.total_episodes},
          {"eval_every", c.eval_every},
          {"validation_episodes", c.validation_episodes},
          {"test_episodes", c.test_episodes},
          {"threads", c.threads},
          {"adam", {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"eps", c.adam.eps}}},
          {"schedule", schedule},
          {"model", model},
          {"episodes",
           {{"train", episode_to_json(c.train_episode)},
            {"validation", episode_to_json(c.validation_episode)},
            {"test", episode_to_json(c.test_episode)}}}};
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& what) { config_error(field, what); };
  if (!(learning_rate > 0.0)) fail("learning_rate", "must be positive");
  if (eval_every == 0) fail("eval_every", "must be positive");
  if (total_episodes > 0 && eval_every > total_episodes) fail("eval_every", "must not exceed total_episodes");
  if (validation_episodes == 0) fail("validation_episodes", "must be positive");
  if (test_episodes == 0) fail("test_episodes", "must be positive");
  if (threads == 0) fail("threads", "must be positive");
  if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0)) fail("adam.beta1", "must lie in (0, 1)");
  if (!(adam.beta2 > 0.0 && adam.beta2 < 1.0)) fail("adam.beta2", "must lie in (0, 1)");
  if (!(adam.eps > 0.0)) fail("adam.eps", "must be positive");
  if (!(schedule.eta > 0.0)) fail("schedule.eta", "must be positive");
  if (model.reduction_ratio == 0) fail("model.reduction_ratio", "must be positive");
  if (model.embedding == models::EmbeddingKind::mlp) {
    if (model.hidden[0] == 0 || model.hidden[1] == 0 || model.output_dim == 0) {
      fail("model", "mlp widths must be positive");
    }
  } else if (model.filters == 0) {
    fail("model.filters", "must be positive");
  }
  const std::pair<const char*, const data::EpisodeSpec*> specs[] = {
      {"episodes.train", &train_episode}, {"episodes.validation", &validation_episode}, {"episodes.test", &test_episode}};
  for (const auto& [name, spec] : specs) {
    try {
      spec->validate();
    } catch (const std::invalid_argument& e) {
      fail(name, e.what());
    }
  }
}

std::size_t TrainConfig::max_selected(const data::EpisodeSpec& spec) const {
  if (schedule.max_selected) return *schedule.max_selected;
  return core::default_max_selected(spec.unlabeled_total(), spec.distractors > 0);
}

core::SelectionSchedule TrainConfig::training_schedule() const {
  return {schedule.eta, max_selected(train_episode), std::max<std::size_t>(total_episodes, 1)};
}

std::string config_to_json(const TrainConfig& config, int indent) { return to_json(config).dump(indent); }

TrainConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  TrainConfig c;
  check_keys(root, "",
             {"seed", "mode", "learning_rate", "total_episodes", "eval_every", "validation_episodes", "test_episodes",
              "threads", "adam", "schedule", "model", "episodes"});
  read_u64(root, "", "seed", c.seed);
  if (root.contains("mode")) c.mode = mode_from_json(root.at("mode"));
  read_real(root, "", "learning_rate", c.learning_rate);
  read_count(root, "", "total_episodes", c.total_episodes);
  read_count(root, "", "eval_every", c.eval_every);
  read_count(root, "", "validation_episodes", c.validation_episodes);
  read_count(root, "", "test_episodes", c.test_episodes);
  read_count(root, "", "threads", c.threads);

  if (root.contains("adam")) {
    const json& a = root.at("adam");
    check_keys(a, "adam", {"beta1", "beta2", "eps"});
    read_real(a, "adam", "beta1", c.adam.beta1);
    read_real(a, "adam", "beta2", c.adam.beta2);
    read_real(a, "adam", "eps", c.adam.eps);
  }
  if (root.contains("schedule")) {
    const json& s = root.at("schedule");
    check_keys(s, "schedule", {"eta", "max_selected"});
    read_real(s, "schedule", "eta", c.schedule.eta);
    if (s.contains("max_selected") && !s.at("max_selected").is_null()) {
      std::size_t m0 = 0;
      read_count(s, "schedule", "max_selected", m0);
      c.schedule.max_selected = m0;
    }
  }
  if (root.contains("model")) {
    const json& m = root.at("model");
    check_keys(m, "model", {"embedding", "hidden", "output_dim", "filters", "reduction_ratio", "input_shape", "pooling"});
    if (m.contains("embedding")) {
      if (!m.at("embedding").is_string()) config_error("model.embedding", "expected a string");
      try {
        c.model.embedding = models::embedding_kind_from_string(m.at("embedding").get<std::string>());
      } catch (const std::invalid_argument& e) {
        config_error("model.embedding", e.what());
      }
    }
    if (m.contains("hidden")) {
      const json& h = m.at("hidden");
      if (!h.is_array() || h.size() != 2 || !h[0].is_number_unsigned() || !h[1].is_number_unsigned()) {
        config_error("model.hidden", "expected two nonnegative integers");
      }
      c.model.hidden = {h[0].get<std::size_t>(), h[1].get<std::size_t>()};
    }
    read_count(m, "model", "output_dim", c.model.output_dim);
    read_count(m, "model", "filters", c.model.filters);
    read_count(m, "model", "reduction_ratio", c.model.reduction_ratio);
    if (m.contains("input_shape")) {
      const json& s = m.at("input_shape");
      if (!s.is_array()) config_error("model.input_shape", "expected an array");
      c.model.input_shape.clear();
      for (const json& e : s) {
        if (!e.is_number_unsigned()) config_error("model.input_shape", "expected nonnegative integers");
        c.model.input_shape.push_back(e.get<std::size_t>());
      }
    }
    if (m.contains("pooling") && m.at("pooling") != "floor") config_error("model.pooling", "only \"floor\" is supported");
  }
  if (root.contains("episodes")) {
    const json& e = root.at("episodes");
    check_keys(e, "episodes", {"train", "validation", "test"});
    if (e.contains("train")) episode_from_json(e.at("train"), "episodes.train", c.train_episode);
    if (e.contains("validation")) episode_from_json(e.at("validation"), "episodes.validation", c.validation_episode);
    if (e.contains("test")) episode_from_json(e.at("test"), "episodes.test", c.test_episode);
  }
  return c;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return config_from_json(text.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

std::uint64_t derive_seed(std::uint64_t base, SeedStream stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  std::uint64_t x = mix(base + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(stream));
  return mix(x + 0x9e3779b97f4a7c15ull * (index + 1));
}

}  // namespace sala::trainer
