#pragma once

#include <stdexcept>
#include <string>

namespace rqt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Basis cannot be built: (E-V)^2 equals the rest energy squared.
class DegenerateBasisError : public Error {
 public:
  using Error::Error;
};

/// E - V vanishes where the formulas divide by it.
class SingularEnergyError : public Error {
 public:
  using Error::Error;
};

/// A position or stencil falls outside the domain a quantity is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numeric integration produced a non-finite value.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rqt
