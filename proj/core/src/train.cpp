// SPDX-License-Identifier: Apache-2.0
#include "mgsa/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mgsa/checkpoint.hpp"
#include "mgsa/threading.hpp"

namespace mgsa {

namespace {

struct AdamState {
  std::vector<Tensor> m1;
  std::vector<Tensor> m2;
};

std::string norm_diagnostics(const ParamStore& ps) {
  double value_norm = 0.0;
  double grad_norm = 0.0;
  for (int s = 0; s < ps.count(); ++s) {
    for (double x : ps.value(s).v) value_norm += x * x;
    for (double g : ps.grad(s).v) grad_norm += g * g;
  }
  return "param_l2=" + std::to_string(std::sqrt(value_norm)) +
         " grad_l2=" + std::to_string(std::sqrt(grad_norm));
}

}  // namespace

TrainResult train_model(Model& m, const Vocab& v, const Corpus& train_corpus,
                        const TrainConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  if (train_corpus.examples.empty())
    throw std::invalid_argument("train_model: empty training corpus");
  const int n = static_cast<int>(train_corpus.examples.size());
  const long steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const long total_steps = steps_per_epoch * cfg.epochs;
  if (cfg.warmup_steps > total_steps)
    throw std::invalid_argument("train_model: warmup_steps " + std::to_string(cfg.warmup_steps) +
                                " exceeds total steps " + std::to_string(total_steps));

  // Preprocess once; examples are immutable across epochs.
  std::vector<PreparedExample> prepared;
  std::vector<std::vector<int>> targets;
  prepared.reserve(train_corpus.examples.size());
  targets.reserve(train_corpus.examples.size());
  for (const Example& ex : train_corpus.examples) {
    prepared.push_back(prepare_example(ex.graph, v, m.config()));
    targets.push_back(encode_target(ex.references.front(), v, m.config().max_gen_len));
  }

  ParamStore& ps = m.params();
  AdamState adam;
  adam.m1.reserve(static_cast<size_t>(ps.count()));
  adam.m2.reserve(static_cast<size_t>(ps.count()));
  for (int s = 0; s < ps.count(); ++s) {
    adam.m1.push_back(Tensor::zeros(ps.value(s).rows, ps.value(s).cols));
    adam.m2.push_back(Tensor::zeros(ps.value(s).rows, ps.value(s).cols));
  }

  const bool use_dropout = m.config().dropout > 0.0;
  TrainResult result;
  long step = 0;
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);
    double epoch_loss_sum = 0.0;
    long epoch_batches = 0;

    for (int start = 0; start < n; start += cfg.batch_size) {
      const int bs = std::min(cfg.batch_size, n - start);
      ++step;
      std::vector<GradSink> sinks;
      sinks.reserve(static_cast<size_t>(bs));
      for (int bi = 0; bi < bs; ++bi) sinks.emplace_back(ps);
      std::vector<double> losses(static_cast<size_t>(bs), 0.0);
      parallel_for(bs, [&](int bi) {
        const int ex = order[static_cast<size_t>(start + bi)];
        Rng drop_rng(mix_seed(mix_seed(cfg.seed ^ 0x6d677361u, static_cast<std::uint64_t>(step)),
                              static_cast<std::uint64_t>(ex)));
        Tape tape;
        Tape::Id loss = loss_on_tape(tape, m, prepared[static_cast<size_t>(ex)],
                                     targets[static_cast<size_t>(ex)],
                                     use_dropout ? &drop_rng : nullptr);
        losses[static_cast<size_t>(bi)] = tape.scalar(loss);
        tape.backward(loss, &sinks[static_cast<size_t>(bi)]);
      });

      double batch_loss = 0.0;
      for (double l : losses) batch_loss += l;
      batch_loss /= bs;

      // Deterministic reduction: sinks merge in example order.
      ps.zero_grad();
      const double inv_bs = 1.0 / bs;
      for (int bi = 0; bi < bs; ++bi) {
        for (int s = 0; s < ps.count(); ++s) {
          const Tensor* g = sinks[static_cast<size_t>(bi)].get(s);
          if (g == nullptr) continue;
          Tensor& acc = ps.grad(s);
          for (size_t k = 0; k < acc.v.size(); ++k) acc.v[k] += g->v[k] * inv_bs;
        }
      }

      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train_model: non-finite loss at epoch " +
                                 std::to_string(epoch) + " batch " +
                                 std::to_string(start / cfg.batch_size) + " (" +
                                 norm_diagnostics(ps) + ")");

      const double warm = cfg.warmup_steps > 0
                              ? std::min(1.0, static_cast<double>(step) / cfg.warmup_steps)
                              : 1.0;
      const double lr = cfg.learning_rate * warm;
      const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
      for (int s = 0; s < ps.count(); ++s) {
        Tensor& value = ps.value(s);
        const Tensor& grad = ps.grad(s);
        Tensor& m1 = adam.m1[static_cast<size_t>(s)];
        Tensor& m2 = adam.m2[static_cast<size_t>(s)];
        for (size_t k = 0; k < value.v.size(); ++k) {
          const double g = grad.v[k];
          m1.v[k] = cfg.adam_beta1 * m1.v[k] + (1.0 - cfg.adam_beta1) * g;
          m2.v[k] = cfg.adam_beta2 * m2.v[k] + (1.0 - cfg.adam_beta2) * g * g;
          const double mhat = m1.v[k] / bc1;
          const double vhat = m2.v[k] / bc2;
          value.v[k] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
        }
      }

      result.log.push_back(TrainLogEntry{epoch, step, batch_loss});
      epoch_loss_sum += batch_loss;
      ++epoch_batches;
    }

    result.epoch_mean_loss.push_back(epoch_loss_sum / static_cast<double>(epoch_batches));
    if (!out_dir.empty() && (epoch % cfg.checkpoint_every == 0 || epoch == cfg.epochs)) {
      const std::string path = out_dir + "/epoch-" + std::to_string(epoch) + ".ckpt";
      save_checkpoint(path, m, v);
      result.checkpoints.push_back(path);
    }
  }
  result.steps = step;
  return result;
}

double mean_teacher_forced_loss(Model& m, const Vocab& v, const Corpus& c) {
  if (c.examples.empty())
    throw std::invalid_argument("mean_teacher_forced_loss: empty corpus");
  double sum = 0.0;
  for (const Example& ex : c.examples) {
    PreparedExample prep = prepare_example(ex.graph, v, m.config());
    const std::vector<int> target = encode_target(ex.references.front(), v, m.config().max_gen_len);
    Tape t(false);
    sum += t.scalar(loss_on_tape(t, m, prep, target, nullptr));
  }
  return sum / static_cast<double>(c.examples.size());
}

}  // namespace mgsa
