// SPDX-License-Identifier: Apache-2.0
//
// mgsa — command-line surface for the multi-granularity graph-to-text
// pipeline: preprocess | linearize | matrices | train | generate | evaluate |
// gradcheck | ablate. Every failure exits nonzero with a one-line JSON error
// on stderr and removes partial outputs. Floats print with 17 significant
// digits so clean re-runs are byte-identical.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mgsa/ablation.hpp"
#include "mgsa/checkpoint.hpp"
#include "mgsa/generate.hpp"
#include "mgsa/grad_check.hpp"
#include "mgsa/json_out.hpp"
#include "mgsa/metrics.hpp"
#include "mgsa/model.hpp"
#include "mgsa/run_config.hpp"
#include "mgsa/text.hpp"
#include "mgsa/train.hpp"

namespace {

using mgsa::fmt_double;
using mgsa::json_quote;

// Removes tracked files unless the command committed them.
class OutputGuard {
 public:
  ~OutputGuard() {
    if (committed_) return;
    for (const std::string& p : paths_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }
  std::ofstream open(const std::string& path) {
    paths_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    return out;
  }
  void track(const std::string& path) { paths_.push_back(path); }
  void commit() { committed_ = true; }

 private:
  std::vector<std::string> paths_;
  bool committed_ = false;
};

struct CommonFlags {
  std::string config_path;
  std::string profile = "desk";
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int beam = 0;
  bool beam_set = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file overlaying the profile");
  cmd->add_option("--profile", f.profile, "base profile: paper or desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--seed", f.seed, "seed override")->each([&](const std::string&) {
    f.seed_set = true;
  });
  cmd->add_option("--beam", f.beam, "beam width override")->each([&](const std::string&) {
    f.beam_set = true;
  });
}

mgsa::RunConfig resolve_config(const CommonFlags& f) {
  mgsa::RunConfig cfg = mgsa::profile_config(f.profile);
  if (!f.config_path.empty()) cfg = mgsa::load_run_config(f.config_path, cfg);
  if (f.seed_set) cfg.train.seed = f.seed;
  if (f.beam_set) cfg.train.beam_width = f.beam;
  if (f.out_dir != ".") cfg.paths.out_dir = f.out_dir;
  if (cfg.paths.out_dir.empty()) cfg.paths.out_dir = f.out_dir;
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

std::string triples_to_json(const mgsa::KnowledgeGraph& g) {
  std::string s = "[";
  for (size_t i = 0; i < g.triples().size(); ++i) {
    const mgsa::Triple& t = g.triples()[i];
    if (i) s += ',';
    s += "[" + json_quote(t.head) + "," + json_quote(t.relation) + "," + json_quote(t.tail) + "]";
  }
  s += "]";
  return s;
}

std::vector<std::string> id_to_token_strings(const std::vector<int>& ids, const mgsa::Vocab& v) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(v.token(id));
  return out;
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

int cmd_preprocess(const CommonFlags& flags, const std::string& input, const std::string& split) {
  mgsa::Corpus corpus = mgsa::parse_corpus(input, split);
  ensure_out_dir(flags.out_dir);
  OutputGuard guard;
  std::ofstream out = guard.open(flags.out_dir + "/clustered.jsonl");
  for (const mgsa::Example& ex : corpus.examples) {
    const mgsa::KnowledgeGraph clustered = mgsa::cluster_by_head(ex.graph);
    out << "{\"triples\":" << triples_to_json(clustered)
        << ",\"text\":" << mgsa::json_string_array(ex.references) << "}\n";
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + flags.out_dir + "/clustered.jsonl");
  guard.commit();
  std::cout << "{\"examples\":" << corpus.examples.size() << ",\"output\":"
            << json_quote(flags.out_dir + "/clustered.jsonl") << "}\n";
  return 0;
}

int cmd_linearize(const CommonFlags& flags, const std::string& input) {
  const mgsa::RunConfig cfg = resolve_config(flags);
  mgsa::Corpus corpus = mgsa::parse_corpus(input, "any");
  const mgsa::Vocab vocab = mgsa::build_vocab(corpus, 1);
  ensure_out_dir(flags.out_dir);
  OutputGuard guard;
  std::ofstream out = guard.open(flags.out_dir + "/linearized.jsonl");
  for (size_t i = 0; i < corpus.examples.size(); ++i) {
    mgsa::PreparedExample prep =
        mgsa::prepare_example(corpus.examples[i].graph, vocab, cfg.model);
    out << "{\"id\":" << i << ",\"entity_tokens\":"
        << mgsa::json_string_array(id_to_token_strings(prep.ent.token_ids, vocab))
        << ",\"entity_units\":" << mgsa::json_int_array(prep.ent.token_unit)
        << ",\"word_tokens\":"
        << mgsa::json_string_array(id_to_token_strings(prep.word.token_ids, vocab))
        << ",\"word_token_nodes\":" << mgsa::json_int_array(prep.word.token_node)
        << ",\"word_nodes\":[";
    for (size_t n = 0; n < prep.word.nodes.size(); ++n) {
      const mgsa::WordNode& wn = prep.word.nodes[n];
      if (n) out << ',';
      out << "{\"unit\":" << wn.unit << ",\"offset\":" << wn.offset
          << ",\"triple\":" << wn.triple << ",\"role\":" << wn.role << "}";
    }
    out << "]}\n";
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + flags.out_dir + "/linearized.jsonl");
  guard.commit();
  std::cout << "{\"examples\":" << corpus.examples.size() << ",\"output\":"
            << json_quote(flags.out_dir + "/linearized.jsonl") << "}\n";
  return 0;
}

int cmd_matrices(const CommonFlags& flags, const std::string& input) {
  const mgsa::RunConfig cfg = resolve_config(flags);
  mgsa::Corpus corpus = mgsa::parse_corpus(input, "any");
  const mgsa::Vocab vocab = mgsa::build_vocab(corpus, 1);
  ensure_out_dir(flags.out_dir);
  OutputGuard guard;
  std::ofstream out = guard.open(flags.out_dir + "/matrices.jsonl");
  for (size_t i = 0; i < corpus.examples.size(); ++i) {
    mgsa::PreparedExample prep =
        mgsa::prepare_example(corpus.examples[i].graph, vocab, cfg.model);
    out << "{\"id\":" << i << ",\"units\":";
    std::vector<std::string> units = prep.graph.entity_nodes();
    for (const std::string& r : prep.graph.relation_nodes()) units.push_back(r);
    out << mgsa::json_string_array(units) << ",\"rel_e\":[";
    for (int r = 0; r < prep.mats.rel_e.rows; ++r) {
      if (r) out << ',';
      std::vector<std::string> row;
      for (int c = 0; c < prep.mats.rel_e.cols; ++c)
        row.push_back(mgsa::entity_label_name(prep.mats.rel_e.at(r, c)));
      out << mgsa::json_string_array(row);
    }
    out << "],\"adjacency\":[";
    for (int r = 0; r < prep.mats.adj.rows; ++r) {
      if (r) out << ',';
      std::vector<int> row;
      for (int c = 0; c < prep.mats.adj.cols; ++c) row.push_back(prep.mats.adj.at(r, c));
      out << mgsa::json_int_array(row);
    }
    out << "],\"rel_w\":[";
    for (int r = 0; r < prep.mats.rel_w.rows; ++r) {
      if (r) out << ',';
      std::vector<std::string> row;
      for (int c = 0; c < prep.mats.rel_w.cols; ++c)
        row.push_back(
            mgsa::word_label_name(prep.mats.rel_w.at(r, c), cfg.model.d_clip, cfg.model.p_clip));
      out << mgsa::json_string_array(row);
    }
    out << "]}\n";
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + flags.out_dir + "/matrices.jsonl");
  guard.commit();
  std::cout << "{\"examples\":" << corpus.examples.size() << ",\"output\":"
            << json_quote(flags.out_dir + "/matrices.jsonl") << "}\n";
  return 0;
}

int cmd_train(const CommonFlags& flags, const std::string& train_path_arg) {
  mgsa::RunConfig cfg = resolve_config(flags);
  if (!train_path_arg.empty()) cfg.paths.train = train_path_arg;
  if (cfg.paths.train.empty())
    throw std::runtime_error("train: no training corpus (give a positional path or paths.train)");

  mgsa::Corpus train_corpus = mgsa::parse_corpus(cfg.paths.train, "train");
  const mgsa::Vocab vocab = mgsa::build_vocab(train_corpus, cfg.train.min_count);
  cfg.model.vocab_size = vocab.size();

  const std::string out_dir =
      cfg.paths.out_dir.empty() ? flags.out_dir : cfg.paths.out_dir;
  ensure_out_dir(out_dir);
  OutputGuard guard;
  {
    std::ofstream echo = guard.open(out_dir + "/effective-config.json");
    echo << mgsa::run_config_to_json_string(cfg) << "\n";
  }

  mgsa::Model model(cfg.model, cfg.train.seed);
  mgsa::TrainResult result = mgsa::train_model(model, vocab, train_corpus, cfg.train, out_dir);
  for (const std::string& p : result.checkpoints) guard.track(p);

  {
    std::ofstream csv = guard.open(out_dir + "/loss.csv");
    csv << "epoch,step,loss\n";
    for (const mgsa::TrainLogEntry& e : result.log)
      csv << e.epoch << "," << e.step << "," << fmt_double(e.loss) << "\n";
  }

  // Model selection: validation BLEU-4 over the saved checkpoints when a
  // validation corpus is configured (greedy decoding), else the final epoch.
  std::string best_path = result.checkpoints.back();
  std::string selection_json;
  if (!cfg.paths.valid.empty()) {
    mgsa::Corpus valid = mgsa::parse_corpus(cfg.paths.valid, "valid");
    double best_bleu = -1.0;
    std::string rows;
    for (const std::string& ckpt_path : result.checkpoints) {
      mgsa::LoadedCheckpoint lc = mgsa::load_checkpoint(ckpt_path);
      std::vector<std::string> cands;
      std::vector<std::vector<std::string>> refs;
      for (const mgsa::Example& ex : valid.examples) {
        mgsa::PreparedExample prep =
            mgsa::prepare_example(ex.graph, lc.vocab, lc.model->config());
        cands.push_back(mgsa::generate_text(*lc.model, lc.vocab, prep, 1));
        refs.push_back(ex.references);
      }
      const double b = mgsa::bleu4(cands, refs);
      if (!rows.empty()) rows += ',';
      rows += "{\"checkpoint\":" + json_quote(ckpt_path) + ",\"bleu4\":" + fmt_double(b) + "}";
      if (b > best_bleu) {
        best_bleu = b;
        best_path = ckpt_path;
      }
    }
    selection_json = "{\"criterion\":\"valid_bleu4_greedy\",\"best\":" + json_quote(best_path) +
                     ",\"candidates\":[" + rows + "]}";
  } else {
    selection_json =
        "{\"criterion\":\"final_epoch\",\"best\":" + json_quote(best_path) + ",\"candidates\":[]}";
  }
  {
    std::ofstream sel = guard.open(out_dir + "/selection.json");
    sel << selection_json << "\n";
  }
  guard.track(out_dir + "/best.ckpt");
  std::filesystem::copy_file(best_path, out_dir + "/best.ckpt",
                             std::filesystem::copy_options::overwrite_existing);

  guard.commit();
  std::cout << "{\"epochs\":" << cfg.train.epochs
            << ",\"final_loss\":" << fmt_double(result.epoch_mean_loss.back())
            << ",\"best_checkpoint\":" << json_quote(best_path) << "}\n";
  return 0;
}

int cmd_generate(const CommonFlags& flags, const std::string& input, const std::string& ckpt) {
  mgsa::LoadedCheckpoint lc = mgsa::load_checkpoint(ckpt);
  mgsa::Corpus corpus = mgsa::parse_corpus(input, "test");
  const int beam = flags.beam_set ? flags.beam : 5;
  if (beam <= 0) throw std::runtime_error("generate: beam width must be positive");
  ensure_out_dir(flags.out_dir);
  OutputGuard guard;
  std::ofstream out = guard.open(flags.out_dir + "/generated.jsonl");
  for (size_t i = 0; i < corpus.examples.size(); ++i) {
    mgsa::PreparedExample prep =
        mgsa::prepare_example(corpus.examples[i].graph, lc.vocab, lc.model->config());
    const std::string text = mgsa::generate_text(*lc.model, lc.vocab, prep, beam);
    out << "{\"id\":" << i << ",\"text\":" << json_quote(text) << "}\n";
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + flags.out_dir + "/generated.jsonl");
  guard.commit();
  std::cout << "{\"examples\":" << corpus.examples.size() << ",\"beam\":" << beam
            << ",\"output\":" << json_quote(flags.out_dir + "/generated.jsonl") << "}\n";
  return 0;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& input,
                 const std::string& generated_path) {
  mgsa::Corpus corpus = mgsa::parse_corpus(input, "test");
  std::ifstream gen(generated_path);
  if (!gen) throw std::runtime_error("cannot open generated file: " + generated_path);
  std::vector<std::string> candidates(corpus.examples.size());
  std::vector<bool> seen(corpus.examples.size(), false);
  std::string line;
  int line_no = 0;
  while (std::getline(gen, line)) {
    ++line_no;
    if (mgsa::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(generated_path + ":" + std::to_string(line_no) +
                               ": malformed JSON: " + e.what());
    }
    const long id = j.at("id").get<long>();
    if (id < 0 || id >= static_cast<long>(candidates.size()))
      throw std::runtime_error(generated_path + ":" + std::to_string(line_no) + ": id " +
                               std::to_string(id) + " outside corpus");
    candidates[static_cast<size_t>(id)] = j.at("text").get<std::string>();
    seen[static_cast<size_t>(id)] = true;
  }
  for (size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw std::runtime_error("evaluate: no generated text for example " + std::to_string(i));

  std::vector<std::vector<std::string>> references;
  references.reserve(corpus.examples.size());
  for (const mgsa::Example& ex : corpus.examples) references.push_back(ex.references);
  const mgsa::ScoreReport report = mgsa::score_report(candidates, references);

  std::string body = "{\"bleu4\":" + fmt_double(report.bleu4) +
                     ",\"rouge_l\":" + fmt_double(report.rouge_l) + ",\"per_example_rouge_l\":" +
                     mgsa::json_double_array(report.per_example_rouge_l) + "}";
  ensure_out_dir(flags.out_dir);
  OutputGuard guard;
  {
    std::ofstream out = guard.open(flags.out_dir + "/scores.json");
    out << body << "\n";
  }
  guard.commit();
  std::cout << body << "\n";
  return 0;
}

int cmd_gradcheck(const CommonFlags& flags, double eps, int samples) {
  mgsa::RunConfig cfg = resolve_config(flags);
  cfg.model.dropout = 0.0;  // the check needs a deterministic loss

  // Built-in two-triple example: shared entity, multi-word spans.
  std::vector<mgsa::Triple> triples{
      {"alpha beta", "linked to", "gamma"},
      {"gamma", "part of", "delta epsilon"},
  };
  mgsa::Example ex;
  ex.graph = mgsa::KnowledgeGraph(triples);
  ex.references = {"alpha beta connects gamma inside delta epsilon"};
  mgsa::Corpus corpus;
  corpus.examples.push_back(ex);
  corpus.split = "gradcheck";

  const mgsa::Vocab vocab = mgsa::build_vocab(corpus, 1);
  cfg.model.vocab_size = vocab.size();
  mgsa::Model model(cfg.model, cfg.train.seed);
  const mgsa::PreparedExample prep = mgsa::prepare_example(ex.graph, vocab, cfg.model);
  const std::vector<int> target =
      mgsa::encode_target(ex.references.front(), vocab, cfg.model.max_gen_len);

  model.params().zero_grad();
  {
    mgsa::Tape tape;
    mgsa::Tape::Id loss = mgsa::loss_on_tape(tape, model, prep, target, nullptr);
    tape.backward(loss);
  }
  auto loss_fn = [&]() {
    mgsa::Tape tape(false);
    return tape.scalar(mgsa::loss_on_tape(tape, model, prep, target, nullptr));
  };
  mgsa::Rng rng(cfg.train.seed + 1);
  const mgsa::GradCheckResult res =
      mgsa::check_gradients(model.params(), loss_fn, eps, samples, rng);

  const bool pass = res.max_rel_err <= 1e-5;
  std::cout << "{\"max_rel_err\":" << fmt_double(res.max_rel_err)
            << ",\"threshold\":" << fmt_double(1e-5) << ",\"coords_checked\":" << res.coords_checked
            << ",\"worst_param\":" << json_quote(res.worst_param)
            << ",\"pass\":" << (pass ? "true" : "false") << "}\n";
  return pass ? 0 : 2;
}

int cmd_ablate(const CommonFlags& flags, const std::string& train_arg,
               const std::string& test_arg) {
  mgsa::RunConfig cfg = resolve_config(flags);
  if (!train_arg.empty()) cfg.paths.train = train_arg;
  if (!test_arg.empty()) cfg.paths.test = test_arg;
  if (cfg.paths.train.empty() || cfg.paths.test.empty())
    throw std::runtime_error("ablate: needs train and test corpora (positional or paths.*)");

  mgsa::Corpus train_corpus = mgsa::parse_corpus(cfg.paths.train, "train");
  mgsa::Corpus test_corpus = mgsa::parse_corpus(cfg.paths.test, "test");
  const std::vector<mgsa::AblationArm> arms = mgsa::standard_ablation_arms(cfg.model);
  const int beam = flags.beam_set ? flags.beam : 1;
  const std::vector<mgsa::AblationRow> rows =
      mgsa::run_ablation(train_corpus, test_corpus, arms, cfg.train, beam);

  ensure_out_dir(flags.out_dir);
  OutputGuard guard;
  {
    std::ofstream echo = guard.open(flags.out_dir + "/effective-config.json");
    echo << mgsa::run_config_to_json_string(cfg) << "\n";
  }
  std::string body = "[";
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i) body += ',';
    body += "{\"arm\":" + json_quote(rows[i].name) + ",\"bleu4\":" + fmt_double(rows[i].bleu4) +
            ",\"rouge_l\":" + fmt_double(rows[i].rouge_l) +
            ",\"exact_match\":" + fmt_double(rows[i].exact_match) +
            ",\"final_train_loss\":" + fmt_double(rows[i].final_train_loss) + "}";
  }
  body += "]";
  {
    std::ofstream out = guard.open(flags.out_dir + "/ablation.json");
    out << body << "\n";
  }
  guard.commit();

  std::cout << "arm,bleu4,rouge_l,exact_match,final_train_loss\n";
  for (const mgsa::AblationRow& r : rows)
    std::cout << r.name << "," << fmt_double(r.bleu4) << "," << fmt_double(r.rouge_l) << ","
              << fmt_double(r.exact_match) << "," << fmt_double(r.final_train_loss) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-granularity graph-structure-attention KG-to-text pipeline"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string input;
  std::string split = "train";
  std::string ckpt;
  std::string generated;
  std::string train_arg;
  std::string test_arg;
  double eps = 1e-6;
  int samples = 64;
  std::function<int()> action;

  CLI::App* preprocess = app.add_subcommand("preprocess", "cluster triples by head entity");
  add_common_flags(preprocess, flags);
  preprocess->add_option("input", input, "corpus JSON-Lines file")->required();
  preprocess->add_option("--split", split, "split tag");
  preprocess->callback([&]() { action = [&]() { return cmd_preprocess(flags, input, split); }; });

  CLI::App* linearize = app.add_subcommand("linearize", "dump both token sequences and maps");
  add_common_flags(linearize, flags);
  linearize->add_option("input", input, "corpus JSON-Lines file")->required();
  linearize->callback([&]() { action = [&]() { return cmd_linearize(flags, input); }; });

  CLI::App* matrices = app.add_subcommand("matrices", "dump structure matrices with label names");
  add_common_flags(matrices, flags);
  matrices->add_option("input", input, "corpus JSON-Lines file")->required();
  matrices->callback([&]() { action = [&]() { return cmd_matrices(flags, input); }; });

  CLI::App* train = app.add_subcommand("train", "train a model; writes checkpoints and loss log");
  add_common_flags(train, flags);
  train->add_option("input", train_arg, "training corpus (overrides paths.train)");
  train->callback([&]() { action = [&]() { return cmd_train(flags, train_arg); }; });

  CLI::App* generate = app.add_subcommand("generate", "decode a corpus with a checkpoint");
  add_common_flags(generate, flags);
  generate->add_option("input", input, "corpus JSON-Lines file")->required();
  generate->add_option("--ckpt", ckpt, "checkpoint file")->required();
  generate->callback([&]() { action = [&]() { return cmd_generate(flags, input, ckpt); }; });

  CLI::App* evaluate = app.add_subcommand("evaluate", "score generated text against references");
  add_common_flags(evaluate, flags);
  evaluate->add_option("input", input, "corpus JSON-Lines file")->required();
  evaluate->add_option("--generated", generated, "generated JSON-Lines file")->required();
  evaluate->callback([&]() { action = [&]() { return cmd_evaluate(flags, input, generated); }; });

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference check of the analytic gradients");
  add_common_flags(gradcheck, flags);
  gradcheck->add_option("--eps", eps, "central-difference step");
  gradcheck->add_option("--samples", samples, "coordinates sampled per parameter");
  gradcheck->callback([&]() { action = [&]() { return cmd_gradcheck(flags, eps, samples); }; });

  CLI::App* ablate = app.add_subcommand("ablate", "train and score the ablation grid");
  add_common_flags(ablate, flags);
  ablate->add_option("train_corpus", train_arg, "training corpus (overrides paths.train)");
  ablate->add_option("test_corpus", test_arg, "test corpus (overrides paths.test)");
  ablate->callback([&]() { action = [&]() { return cmd_ablate(flags, train_arg, test_arg); }; });

  CLI11_PARSE(app, argc, argv);

  try {
    return action ? action() : 1;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":" << json_quote(e.what()) << "}\n";
    return 1;
  }
}
