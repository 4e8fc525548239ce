#pragma once

#include <stdexcept>
#include <string>

namespace netlift {

// parameter outside its admissible domain (eps, a, step sizes, ...)
struct invalid_parameter : std::invalid_argument {
  explicit invalid_parameter(const std::string& msg) : std::invalid_argument(msg) {}
};

// inconsistent run / grid configuration
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// problem has no feasible solution (e.g. unbalanced masses)
struct infeasible_error : std::runtime_error {
  explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace netlift
