// SPDX-License-Identifier: Apache-2.0
#include "mgsa/json_out.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mgsa {

std::string fmt_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("fmt_double: non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
  return out;
}

namespace {
template <typename T, typename F>
std::string join_array(const std::vector<T>& items, F&& fmt) {
  std::string out = "[";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  out += ']';
  return out;
}
}  // namespace

std::string json_string_array(const std::vector<std::string>& items) {
  return join_array(items, [](const std::string& s) { return json_quote(s); });
}

std::string json_int_array(const std::vector<int>& items) {
  return join_array(items, [](int x) { return std::to_string(x); });
}

std::string json_double_array(const std::vector<double>& items) {
  return join_array(items, [](double x) { return fmt_double(x); });
}

}  // namespace mgsa
