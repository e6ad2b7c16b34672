// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_TRAIN_HPP_
#define MGSA_TRAIN_HPP_

#include <string>
#include <vector>

#include "mgsa/model.hpp"
#include "mgsa/run_config.hpp"

namespace mgsa {

struct TrainLogEntry {
  int epoch = 0;  // 1-based
  long step = 0;  // global optimizer step, 1-based
  double loss = 0.0;
};

struct TrainResult {
  std::vector<TrainLogEntry> log;          // one entry per optimizer step
  std::vector<double> epoch_mean_loss;     // one entry per epoch
  std::vector<std::string> checkpoints;    // paths written, in epoch order
  long steps = 0;
};

// Adam with linear warmup then a constant rate, per-epoch shuffling from the
// seed, and a mean-of-example-means batch loss. Per-example gradients are
// computed in parallel but summed in example order, so results do not depend
// on MGSA_THREADS. Teacher forcing uses each example's first reference.
// Checkpoints go to out_dir every checkpoint_every epochs (plus the final
// epoch); an empty out_dir disables checkpointing. A non-finite loss aborts
// with a diagnostic naming the epoch, batch, and parameter norms.
TrainResult train_model(Model& m, const Vocab& v, const Corpus& train_corpus,
                        const TrainConfig& cfg, const std::string& out_dir);

// Mean teacher-forced NLL over a corpus (first reference per example).
double mean_teacher_forced_loss(Model& m, const Vocab& v, const Corpus& c);

}  // namespace mgsa

#endif  // MGSA_TRAIN_HPP_
