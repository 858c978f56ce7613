// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <stdexcept>
#include <string>

namespace sdq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant or precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file or document could not be parsed into the expected shape.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A numeric transform was asked to leave its domain (e.g. log of a non-positive value).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive search would enumerate more candidates than its budget allows.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A QI-dependent engine was invoked on a segment cost that is known to violate the QI.
class QiRequired : public Error {
 public:
  using Error::Error;
};

}  // namespace sdq
