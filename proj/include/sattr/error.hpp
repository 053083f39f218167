// Copyright 2026 The spectral-attr Authors.
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sattr {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch, out-of-range parameter, non-finite value, malformed spec.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Input is well formed but has no meaningful answer (e.g. zero sigma_max).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// A precondition on a model was violated (e.g. non-symmetric field).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A gradient evaluation produced NaN/Inf along a path.
class NumericalFailure : public Error {
 public:
  NumericalFailure(std::size_t step, const std::string& what)
      : Error("numerical failure at step " + std::to_string(step) + ": " + what),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Malformed file contents. Carries either a byte offset (image/tensor files)
// or a line/column pair (result documents); unused fields are zero.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset, std::size_t line = 0,
             std::size_t column = 0)
      : Error(what), byte_offset_(byte_offset), line_(line), column_(column) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t byte_offset_;
  std::size_t line_;
  std::size_t column_;
};

// File could not be opened, read, written or renamed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sattr
