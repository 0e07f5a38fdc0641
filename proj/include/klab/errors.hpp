#pragma once

#include <stdexcept>
#include <string>

namespace klab {

/// Invalid model, submanifold or experiment description. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed to converge or hit a degenerate configuration
/// (e.g. a focal point at a return time). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace klab
