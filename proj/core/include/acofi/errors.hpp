#pragma once

#include <stdexcept>
#include <string>

namespace acofi {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonConvergence : std::runtime_error {
  double residual;
  explicit NonConvergence(double res)
      : std::runtime_error("value iteration did not converge, residual " +
                           std::to_string(res)),
        residual(res) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct HeaderMismatch : std::runtime_error {
  explicit HeaderMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyInput : std::runtime_error {
  explicit EmptyInput(const std::string& msg) : std::runtime_error(msg) {}
};

struct MalformedTrace : std::runtime_error {
  explicit MalformedTrace(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace acofi
