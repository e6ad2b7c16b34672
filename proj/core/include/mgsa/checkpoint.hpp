// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_CHECKPOINT_HPP_
#define MGSA_CHECKPOINT_HPP_

#include <memory>
#include <string>

#include "mgsa/model.hpp"
#include "mgsa/vocab.hpp"

namespace mgsa {

// Checkpoint layout: a single-line JSON header (format tag, model config,
// vocabulary, parameter manifest with shapes), one '\n', then the raw
// little-endian f64 parameter payload in manifest order.
void save_checkpoint(const std::string& path, const Model& m, const Vocab& v);

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  Vocab vocab;
};

// Validates the format tag, config, manifest names/shapes, and payload size.
// Throws std::runtime_error on any mismatch.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace mgsa

#endif  // MGSA_CHECKPOINT_HPP_
