// Copyright 2026 The SSGC Authors.
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

#ifndef SSGC_ERROR_H_
#define SSGC_ERROR_H_

#include <stdexcept>
#include <string>

namespace ssgc {

// Malformed input (bad JSON, bad column file, dangling ids).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string &what, int line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what
                                     : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input that breaks a document or graph invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or argument mismatches in numerical code.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssgc

#endif  // SSGC_ERROR_H_
