#pragma once

#include <stdexcept>
#include <string>

namespace primerace {

// Bad input: maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Numerical or search failure on valid input: maps to CLI exit code 1.
class ComputationError : public std::runtime_error {
 public:
  ComputationError(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace primerace
