#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace egomwf {

// Base for everything the library throws on bad input or failed numerics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration. Carries every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  explicit ConfigError(const std::string& violation)
      : ConfigError(std::vector<std::string>{violation}) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Cholesky hit a non-positive pivot; the caller should regularize.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot, double value);
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(std::size_t sweeps, double residual);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace egomwf
