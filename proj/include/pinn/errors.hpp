#pragma once

#include <stdexcept>
#include <string>

namespace pinn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArchitectureError : public Error {
 public:
  using Error::Error;
};

/// Input or output dimension does not match the network or problem.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

/// A quadrature rule or training set would be empty.
class EmptyRuleError : public Error {
 public:
  using Error::Error;
};

/// A query point lies outside the domain a solution is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested time step violates the explicit scheme's stability limit.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// Loss became non-finite or every restart failed.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration. `path` names the field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace pinn
