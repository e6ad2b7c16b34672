// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_TEXT_HPP_
#define MGSA_TEXT_HPP_

#include <sstream>
#include <string>
#include <vector>

namespace mgsa {

inline std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Whitespace tokenization; the single tokenizer shared by the linearizer,
// the vocabulary builder, and the metrics.
inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace mgsa

#endif  // MGSA_TEXT_HPP_
