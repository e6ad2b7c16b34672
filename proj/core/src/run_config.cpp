// SPDX-License-Identifier: Apache-2.0
#include "mgsa/run_config.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "mgsa/json_out.hpp"

namespace mgsa {

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("TrainConfig: " + msg); };
  if (epochs <= 0 || batch_size <= 0) fail("epochs and batch_size must be positive");
  if (learning_rate <= 0.0) fail("learning_rate must be positive");
  if (warmup_steps < 0) fail("warmup_steps must be nonnegative");
  if (adam_epsilon <= 0.0) fail("adam_epsilon must be positive");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0)
    fail("adam betas must be in [0, 1)");
  if (beam_width <= 0) fail("beam_width must be positive");
  if (min_count <= 0) fail("min_count must be positive");
  if (checkpoint_every <= 0) fail("checkpoint_every must be positive");
}

RunConfig profile_config(const std::string& name) {
  RunConfig cfg;
  if (name == "paper") {
    cfg.model.d_model = 768;
    cfg.model.n_heads = 12;
    cfg.model.n_layers = 6;
    cfg.model.dropout = 0.1;
    cfg.train.epochs = 40;
    cfg.train.batch_size = 16;
    cfg.train.learning_rate = 2e-5;
    cfg.train.warmup_steps = 1600;
    cfg.train.checkpoint_every = 1;
  } else if (name == "desk") {
    cfg.model.d_model = 32;
    cfg.model.n_heads = 2;
    cfg.model.n_layers = 2;
    cfg.model.dropout = 0.0;
    cfg.train.epochs = 500;
    cfg.train.batch_size = 16;
    cfg.train.learning_rate = 1e-3;
    cfg.train.warmup_steps = 20;
    cfg.train.checkpoint_every = 100;
  } else {
    throw std::invalid_argument("unknown profile \"" + name + "\" (expected paper or desk)");
  }
  return cfg;
}

namespace {

void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const std::string& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw std::invalid_argument("config: unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
void read_into(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config file " + path + " is not valid JSON: " + e.what());
  }
  check_keys(j, {"model", "train", "paths"}, "top level");

  if (j.contains("model")) {
    const auto& m = j.at("model");
    check_keys(m,
               {"d_model", "n_heads", "n_layers", "lambda", "d_clip", "p_clip", "max_input_len",
                "max_gen_len", "dropout", "use_adjacency", "use_entity_labels",
                "use_word_labels"},
               "\"model\"");
    read_into(m, "d_model", base.model.d_model);
    read_into(m, "n_heads", base.model.n_heads);
    read_into(m, "n_layers", base.model.n_layers);
    read_into(m, "lambda", base.model.lambda);
    read_into(m, "d_clip", base.model.d_clip);
    read_into(m, "p_clip", base.model.p_clip);
    read_into(m, "max_input_len", base.model.max_input_len);
    read_into(m, "max_gen_len", base.model.max_gen_len);
    read_into(m, "dropout", base.model.dropout);
    read_into(m, "use_adjacency", base.model.use_adjacency);
    read_into(m, "use_entity_labels", base.model.use_entity_labels);
    read_into(m, "use_word_labels", base.model.use_word_labels);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    check_keys(t,
               {"epochs", "batch_size", "learning_rate", "warmup_steps", "adam_epsilon",
                "adam_beta1", "adam_beta2", "beam_width", "seed", "min_count",
                "checkpoint_every"},
               "\"train\"");
    read_into(t, "epochs", base.train.epochs);
    read_into(t, "batch_size", base.train.batch_size);
    read_into(t, "learning_rate", base.train.learning_rate);
    read_into(t, "warmup_steps", base.train.warmup_steps);
    read_into(t, "adam_epsilon", base.train.adam_epsilon);
    read_into(t, "adam_beta1", base.train.adam_beta1);
    read_into(t, "adam_beta2", base.train.adam_beta2);
    read_into(t, "beam_width", base.train.beam_width);
    read_into(t, "seed", base.train.seed);
    read_into(t, "min_count", base.train.min_count);
    read_into(t, "checkpoint_every", base.train.checkpoint_every);
  }
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    check_keys(p, {"train", "valid", "test", "out_dir"}, "\"paths\"");
    read_into(p, "train", base.paths.train);
    read_into(p, "valid", base.paths.valid);
    read_into(p, "test", base.paths.test);
    read_into(p, "out_dir", base.paths.out_dir);
  }
  base.train.validate();
  return base;
}

std::string run_config_to_json_string(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  const TrainConfig& t = cfg.train;
  std::string s = "{\"model\":{";
  s += "\"d_model\":" + std::to_string(m.d_model);
  s += ",\"n_heads\":" + std::to_string(m.n_heads);
  s += ",\"n_layers\":" + std::to_string(m.n_layers);
  s += ",\"lambda\":" + fmt_double(m.lambda);
  s += ",\"d_clip\":" + std::to_string(m.d_clip);
  s += ",\"p_clip\":" + std::to_string(m.p_clip);
  s += ",\"max_input_len\":" + std::to_string(m.max_input_len);
  s += ",\"max_gen_len\":" + std::to_string(m.max_gen_len);
  s += ",\"dropout\":" + fmt_double(m.dropout);
  s += ",\"use_adjacency\":" + std::string(m.use_adjacency ? "true" : "false");
  s += ",\"use_entity_labels\":" + std::string(m.use_entity_labels ? "true" : "false");
  s += ",\"use_word_labels\":" + std::string(m.use_word_labels ? "true" : "false");
  s += "},\"train\":{";
  s += "\"epochs\":" + std::to_string(t.epochs);
  s += ",\"batch_size\":" + std::to_string(t.batch_size);
  s += ",\"learning_rate\":" + fmt_double(t.learning_rate);
  s += ",\"warmup_steps\":" + std::to_string(t.warmup_steps);
  s += ",\"adam_epsilon\":" + fmt_double(t.adam_epsilon);
  s += ",\"adam_beta1\":" + fmt_double(t.adam_beta1);
  s += ",\"adam_beta2\":" + fmt_double(t.adam_beta2);
  s += ",\"beam_width\":" + std::to_string(t.beam_width);
  s += ",\"seed\":" + std::to_string(t.seed);
  s += ",\"min_count\":" + std::to_string(t.min_count);
  s += ",\"checkpoint_every\":" + std::to_string(t.checkpoint_every);
  s += "},\"paths\":{";
  s += "\"train\":" + json_quote(cfg.paths.train);
  s += ",\"valid\":" + json_quote(cfg.paths.valid);
  s += ",\"test\":" + json_quote(cfg.paths.test);
  s += ",\"out_dir\":" + json_quote(cfg.paths.out_dir);
  s += "}}";
  return s;
}

}  // namespace mgsa
