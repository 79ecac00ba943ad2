// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace emovec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input from the caller: malformed files, out-of-range arguments.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A token context longer than the backend's window. Callers truncate first.
class ContextTooLongError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Anything that went wrong inside a language-model backend.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// Network or server-side failure. Safe to retry.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// The server answered, but the answer breaks the wire contract.
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Response body could not be decoded, or has the wrong shape.
class MalformedResponseError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

/// Every descriptor scored zero; the backend or tokenizer is broken.
class DegenerateDistributionError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace emovec
