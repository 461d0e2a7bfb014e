#pragma once

#include <stdexcept>
#include <string>

namespace lsinv {

/// Invalid or inconsistent configuration (bad manifest, unsupported option).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Array shapes or lengths that do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (factorization, residual check).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lsinv
