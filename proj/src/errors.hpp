// Copyright 2026 The Sluice Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace sluice {

// All library failures derive from Error. The C API maps each kind onto a
// status code; see include/sluice/sluice.h.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes or configuration dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A call was made in a state where it is not allowed (e.g. backward twice).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Gold label outside the label inventory.
class LabelError : public Error {
 public:
  using Error::Error;
};

// Empty or insufficient input data.
class InputError : public Error {
 public:
  using Error::Error;
};

// Inconsistent model configuration (alpha/beta wiring, counts).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf surfaced during a forward computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed corpus file; carries the offending line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Bad user-facing configuration: unknown key, ill-typed value.
class UsageError : public Error {
 public:
  using Error::Error;
};

// File missing or unreadable, snapshot mismatch.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sluice
