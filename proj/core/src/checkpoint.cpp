// SPDX-License-Identifier: Apache-2.0
#include "mgsa/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "mgsa/json_out.hpp"

namespace mgsa {

namespace {

constexpr const char* kFormatTag = "mgsa-checkpoint-v1";

std::string config_to_json(const ModelConfig& c) {
  std::string s = "{";
  s += "\"d_model\":" + std::to_string(c.d_model);
  s += ",\"n_heads\":" + std::to_string(c.n_heads);
  s += ",\"n_layers\":" + std::to_string(c.n_layers);
  s += ",\"lambda\":" + fmt_double(c.lambda);
  s += ",\"d_clip\":" + std::to_string(c.d_clip);
  s += ",\"p_clip\":" + std::to_string(c.p_clip);
  s += ",\"max_input_len\":" + std::to_string(c.max_input_len);
  s += ",\"max_gen_len\":" + std::to_string(c.max_gen_len);
  s += ",\"dropout\":" + fmt_double(c.dropout);
  s += ",\"vocab_size\":" + std::to_string(c.vocab_size);
  s += std::string(",\"use_adjacency\":") + (c.use_adjacency ? "true" : "false");
  s += std::string(",\"use_entity_labels\":") + (c.use_entity_labels ? "true" : "false");
  s += std::string(",\"use_word_labels\":") + (c.use_word_labels ? "true" : "false");
  s += "}";
  return s;
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.d_model = j.at("d_model").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.n_layers = j.at("n_layers").get<int>();
  c.lambda = j.at("lambda").get<double>();
  c.d_clip = j.at("d_clip").get<int>();
  c.p_clip = j.at("p_clip").get<int>();
  c.max_input_len = j.at("max_input_len").get<int>();
  c.max_gen_len = j.at("max_gen_len").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.use_adjacency = j.at("use_adjacency").get<bool>();
  c.use_entity_labels = j.at("use_entity_labels").get<bool>();
  c.use_word_labels = j.at("use_word_labels").get<bool>();
  return c;
}

void write_le_double(std::ofstream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double read_le_double(std::ifstream& in) {
  char bytes[8];
  in.read(bytes, 8);
  if (in.gcount() != 8) throw std::runtime_error("checkpoint payload truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  double x;
  std::memcpy(&x, &bits, sizeof(x));
  return x;
}

}  // namespace

void save_checkpoint(const std::string& path, const Model& m, const Vocab& v) {
  const ParamStore& ps = m.params();
  std::string header = "{\"format\":";
  header += json_quote(kFormatTag);
  header += ",\"config\":" + config_to_json(m.config());
  header += ",\"vocab\":" + json_string_array(v.tokens());
  header += ",\"params\":[";
  for (int s = 0; s < ps.count(); ++s) {
    if (s) header += ',';
    const Tensor& t = ps.value(s);
    header += "{\"name\":" + json_quote(ps.name(s)) + ",\"rows\":" + std::to_string(t.rows) +
              ",\"cols\":" + std::to_string(t.cols) + "}";
  }
  header += "]}";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << header << '\n';
  for (int s = 0; s < ps.count(); ++s)
    for (double x : ps.value(s).v) write_le_double(out, x);
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("checkpoint header missing: " + path);

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint header is not valid JSON: " + std::string(e.what()));
  }
  if (j.value("format", "") != kFormatTag)
    throw std::runtime_error("unrecognized checkpoint format tag");

  LoadedCheckpoint lc;
  std::vector<std::string> tokens;
  for (const auto& t : j.at("vocab")) tokens.push_back(t.get<std::string>());
  lc.vocab = Vocab::from_tokens(tokens);

  const ModelConfig cfg = config_from_json(j.at("config"));
  if (cfg.vocab_size != lc.vocab.size())
    throw std::runtime_error("checkpoint vocab size disagrees with config");
  lc.model = std::make_unique<Model>(cfg, 0);

  ParamStore& ps = lc.model->params();
  const auto& manifest = j.at("params");
  if (static_cast<int>(manifest.size()) != ps.count())
    throw std::runtime_error("checkpoint manifest has " + std::to_string(manifest.size()) +
                             " params, model expects " + std::to_string(ps.count()));
  for (int s = 0; s < ps.count(); ++s) {
    const auto& entry = manifest.at(static_cast<size_t>(s));
    Tensor& t = ps.value(s);
    if (entry.at("name").get<std::string>() != ps.name(s) ||
        entry.at("rows").get<int>() != t.rows || entry.at("cols").get<int>() != t.cols)
      throw std::runtime_error("checkpoint manifest mismatch at param " + ps.name(s));
    for (double& x : t.v) x = read_le_double(in);
  }
  char extra;
  if (in.read(&extra, 1) && in.gcount() == 1)
    throw std::runtime_error("checkpoint has trailing bytes");
  return lc;
}

}  // namespace mgsa
