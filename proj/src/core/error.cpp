// Copyright 2026 The rilt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rilt/error.hpp"

#include <algorithm>
#include <sstream>

namespace rilt {

std::string ParseDiagnostic::str() const {
  std::ostringstream os;
  os << "[" << begin << "," << end << ") " << message;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
    os << ")";
  }
  return os.str();
}

std::string ParseDiagnostic::str(std::string_view source) const {
  std::size_t at = std::min(begin, source.size());
  // end of input is reported at the end of the last line
  if (at == source.size())
    while (at > 0 && source[at - 1] == '\n') --at;
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < at; ++i) {
    if (source[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::string s = str();
  s.erase(0, s.find(')') + 2);
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + s;
}

namespace {

std::string join_diagnostics(const std::vector<ParseDiagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "; ";
    out += d.str();
  }
  return out.empty() ? std::string("parse error") : out;
}

}  // namespace

ParseError::ParseError(std::vector<ParseDiagnostic> diags)
    : Error(ErrorCode::parse, join_diagnostics(diags)), diags_(std::move(diags)) {}

}  // namespace rilt
