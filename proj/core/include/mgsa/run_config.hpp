// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_RUN_CONFIG_HPP_
#define MGSA_RUN_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "mgsa/model.hpp"

namespace mgsa {

struct TrainConfig {
  int epochs = 40;
  int batch_size = 16;
  double learning_rate = 2e-5;
  int warmup_steps = 1600;
  double adam_epsilon = 1e-8;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int beam_width = 5;
  std::uint64_t seed = 1;
  int min_count = 1;
  int checkpoint_every = 1;  // epochs between checkpoint files

  void validate() const;  // throws std::invalid_argument
};

struct RunPaths {
  std::string train;
  std::string valid;
  std::string test;
  std::string out_dir;
};

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  RunPaths paths;
};

// Built-in profiles: "paper" (d=768, 12 heads, 6 layers, lr 2e-5, 40 epochs,
// warmup 1600, dropout 0.1) and "desk" (d=32, 2 heads, 2 layers, lr 1e-3,
// dropout 0, sized for toy runs). Throws std::invalid_argument otherwise.
RunConfig profile_config(const std::string& name);

// Overlays a JSON config file onto a base config. The file may contain
// "model", "train", and "paths" objects whose keys mirror the struct fields;
// unknown keys anywhere are rejected.
RunConfig load_run_config(const std::string& path, RunConfig base);

// Canonical single-line JSON echo of the effective configuration.
std::string run_config_to_json_string(const RunConfig& cfg);

}  // namespace mgsa

#endif  // MGSA_RUN_CONFIG_HPP_
