// Copyright 2026 The Selective Learning Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SL_ERRORS_H_
#define SL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace sl {

// Every error raised by the library derives from Error and carries a short
// machine-readable category ("parse", "contract", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("parse", "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& message)
      : Error("empty_input", message) {}
};

// Violated precondition: shape mismatch, bad argument.
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& message)
      : Error("contract", message) {}
};

// Segment too short for the requested lookback/horizon.
class SizingError : public Error {
 public:
  SizingError(std::size_t required, std::size_t actual)
      : Error("sizing", "segment length " + std::to_string(actual) +
                            " is shorter than the required minimum " +
                            std::to_string(required)),
        required_(required) {}

  std::size_t required() const { return required_; }

 private:
  std::size_t required_;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message)
      : Error("numeric", message) {}
};

// Selective loss over a mask with zero kept entries.
class DegenerateMaskError : public Error {
 public:
  DegenerateMaskError() : Error("degenerate_mask", "mask keeps no entries") {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& message)
      : Error("training", message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error("validation", message) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error("usage", message) {}
};

}  // namespace sl

#endif  // SL_ERRORS_H_
