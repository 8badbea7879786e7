// Copyright 2026 the rfot authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rfot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Run configuration problems (bad flags, contradictory backend modes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Anything wrong with input data (files, rows, labels).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input row; carries the 1-based line number when known.
class ParseError : public DataError {
 public:
  explicit ParseError(const std::string& what) : DataError(what), line_(0) {}
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

// Transport-level failure (connection refused, timeout). Retriable.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Backend answered but the answer is unusable; carries the HTTP status when
/// one exists.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what) : Error(what), status_(0) {}
  BackendError(const std::string& what, int status)
      : Error(what + " (status " + std::to_string(status) + ")"), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// Replay asked for a request the cassette has no (remaining) answer for.
class CassetteMissError : public Error {
 public:
  explicit CassetteMissError(const std::string& fingerprint)
      : Error("cassette miss for fingerprint " + fingerprint), fingerprint_(fingerprint) {}
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::string fingerprint_;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

// Thought generation failed outright for a whole record.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// No usable label could be extracted for a record.
class PredictionError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfot
