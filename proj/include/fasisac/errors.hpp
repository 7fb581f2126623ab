#pragma once

#include <stdexcept>
#include <string>

namespace fasisac {

/// Invalid configuration or dimension mismatch detected before any numerics run.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical contract broken at runtime (lost PSD-ness, failed factorization, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fasisac
