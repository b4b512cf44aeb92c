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

#ifndef RILT_ERROR_HPP
#define RILT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rilt {

// Numeric values match the CLI exit codes where one exists.
enum class ErrorCode {
  usage = 1,
  parse = 2,
  solve = 3,
  acceptance = 4,
  domain = 5,
  internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Precondition or domain violation inside the algebra (negative power, pole, ...).
inline Error domain_error(const std::string& what) { return Error(ErrorCode::domain, what); }

struct ParseDiagnostic {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string message;
  std::vector<std::string> expected;

  std::string str() const;
  /// "line L, column C: message" against the text the spans refer to.
  std::string str(std::string_view source) const;
};

class ParseError : public Error {
 public:
  explicit ParseError(std::vector<ParseDiagnostic> diags);
  const std::vector<ParseDiagnostic>& diagnostics() const noexcept { return diags_; }

 private:
  std::vector<ParseDiagnostic> diags_;
};

}  // namespace rilt

#endif  // RILT_ERROR_HPP
