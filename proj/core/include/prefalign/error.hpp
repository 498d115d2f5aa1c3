// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace prefalign {

// Root of every exception thrown by the library. Subclasses name the failure
// category so callers (and the CLI exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric or enum parameter is outside its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized input. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::string record_id = {}, std::size_t line = 0)
      : Error(format(what, record_id, line)),
        reason_(what),
        record_id_(std::move(record_id)),
        line_(line) {}
  // The message without the line/record prefix.
  const std::string& reason() const noexcept { return reason_; }
  const std::string& record_id() const noexcept { return record_id_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& what, const std::string& id, std::size_t line) {
    std::string out;
    if (line) out += "line " + std::to_string(line) + ": ";
    if (!id.empty()) out += "record '" + id + "': ";
    return out + what;
  }
  std::string reason_;
  std::string record_id_;
  std::size_t line_;
};

// Caller-supplied data does not satisfy an operation's precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// A scorer was called in a way its metric contract forbids (e.g. no reference).
class ContractError : public Error {
 public:
  using Error::Error;
};

// External scorer answered with something that is not a valid response.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// External scorer could not be reached, or retries were exhausted.
class TransportError : public Error {
 public:
  using Error::Error;
};

// A loss or gradient became NaN/inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Calibration search found no configuration that emits any pair.
class NoSolutionError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace prefalign
