#pragma once

#include <stdexcept>
#include <string>

namespace adapta {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside the domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Messages carry "<source>:<line>:" when known.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally well-formed input that violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An API was driven in an order or with arguments it does not support.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A run configuration that cannot be executed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The oracle has nothing to evaluate (every sensor deactivated).
class OracleUndefined : public Error {
 public:
  using Error::Error;
};

}  // namespace adapta
