// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_JSON_OUT_HPP_
#define MGSA_JSON_OUT_HPP_

#include <string>
#include <vector>

namespace mgsa {

// All JSON this project emits prints floating point through fmt_double so
// outputs are byte-reproducible across runs: %.17g round-trips every finite
// f64 exactly.
std::string fmt_double(double x);

// Quotes and escapes a string for JSON output.
std::string json_quote(const std::string& s);

std::string json_string_array(const std::vector<std::string>& items);
std::string json_int_array(const std::vector<int>& items);
std::string json_double_array(const std::vector<double>& items);

}  // namespace mgsa

#endif  // MGSA_JSON_OUT_HPP_
