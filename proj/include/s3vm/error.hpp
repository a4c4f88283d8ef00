// Copyright 2026 The Authors.
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

#ifndef S3VM_ERROR_HPP_
#define S3VM_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace s3vm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed libsvm input. line() is 1-based; 0 when the error is not tied to
// a particular line (e.g. empty input).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Argument out of the documented domain (C <= 0, k out of range, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Vector/matrix sizes that do not agree with each other.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace s3vm

#endif  // S3VM_ERROR_HPP_
