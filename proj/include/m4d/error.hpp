// Copyright 2026 The m4d Authors
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

#ifndef M4D_ERROR_HPP_
#define M4D_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace m4d {

// Error categories map one-to-one onto process exit codes so the CLI can
// report machine-readable failures without string matching.
enum class ErrorCategory {
  kConfig = 2,     // invalid or inconsistent configuration
  kIo = 3,         // missing, unreadable, or malformed files
  kNumerical = 4,  // non-finite losses, degenerate geometry
  kRejected = 5,   // every candidate failed a physical filter
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string type, const std::string& message)
      : std::runtime_error(message),
        category_(category),
        type_(std::move(type)) {}

  ErrorCategory category() const { return category_; }
  const std::string& type() const { return type_; }
  int exit_code() const { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
  std::string type_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::kConfig, "ConfigError", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::kIo, "IoError", message) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message)
      : Error(ErrorCategory::kIo, "ParseError", message) {}
};

class SchemaVersionMismatch : public Error {
 public:
  explicit SchemaVersionMismatch(const std::string& message)
      : Error(ErrorCategory::kIo, "SchemaVersionMismatch", message) {}
};

class NumericalError : public Error {
 public:
  NumericalError(std::string type, const std::string& message)
      : Error(ErrorCategory::kNumerical, std::move(type), message) {}
};

class NonWatertightError : public NumericalError {
 public:
  explicit NonWatertightError(const std::string& message)
      : NumericalError("NonWatertight", message) {}
};

class DegenerateMeshError : public NumericalError {
 public:
  explicit DegenerateMeshError(const std::string& message)
      : NumericalError("DegenerateMesh", message) {}
};

class NonFiniteLossError : public NumericalError {
 public:
  NonFiniteLossError(int iteration, const std::string& message)
      : NumericalError("NonFiniteLoss", message), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_ = -1;
};

class AllCandidatesRejectedError : public Error {
 public:
  explicit AllCandidatesRejectedError(const std::string& message)
      : Error(ErrorCategory::kRejected, "AllCandidatesRejected", message) {}
};

// One-line JSON object {"error":{"type":...,"message":...,"exit_code":...}}
// for machine-readable stderr reporting.
std::string error_json(const Error& e);

}  // namespace m4d

#endif  // M4D_ERROR_HPP_
