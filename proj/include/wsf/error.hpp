// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace wsf {

/// Base of every error raised by the library. Each subclass corresponds to one
/// failure category so callers can react (e.g. skip a unit) without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File opened but its contents are malformed or use an unsupported layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition (bad argument, mismatched grids).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Inputs are well-formed but the computation has no meaningful answer
/// (empty intersection, no candidates, too few samples).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Configuration or threshold tables are incomplete or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// SVM solver failed to reach the KKT tolerance.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace wsf
