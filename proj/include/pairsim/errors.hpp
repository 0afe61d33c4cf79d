#pragma once

#include <stdexcept>
#include <string>

namespace pairsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument value or shape.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Dense representation would exceed the supported qubit count.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Input violated a documented precondition (e.g. non-Hermitian Hamiltonian).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class CompileError : public Error {
 public:
  using Error::Error;
};

class UnrealizableCoupling : public CompileError {
 public:
  using CompileError::CompileError;
};

class NoReachableState : public Error {
 public:
  using Error::Error;
};

class NoPeak : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

// Configuration problem; `field()` names the offending dotted key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace pairsim
