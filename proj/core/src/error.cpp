#include "egomwf/error.hpp"

#include <sstream>

namespace egomwf {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "; " : "") << items[i];
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error("invalid configuration: " + join(violations)), violations_(std::move(violations)) {}

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot, double value)
    : Error("matrix is not positive definite (pivot " + std::to_string(pivot) +
            " = " + std::to_string(value) + ")"),
      pivot_(pivot) {}

ConvergenceError::ConvergenceError(std::size_t sweeps, double residual)
    : Error("Jacobi eigensolver did not converge after " + std::to_string(sweeps) +
            " sweeps (off-diagonal residual " + std::to_string(residual) + ")"),
      residual_(residual) {}

}  // namespace egomwf
