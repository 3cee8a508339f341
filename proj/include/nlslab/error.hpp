#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

// Invalid or inconsistent experiment configuration (CLI exit status 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: health violation, non-convergence, mass loss (exit status 1).
// Messages are prefixed with the module that raised them, e.g. "solvers: ...".
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace nlslab
