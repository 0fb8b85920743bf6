#pragma once

#include <stdexcept>
#include <string>

namespace toolwear {

// Invalid configuration or arguments.  CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Sampling failed or did not converge.  CLI exit code 3.
struct InferenceError : std::runtime_error {
  explicit InferenceError(const std::string& what) : std::runtime_error(what) {}
};

// File or parse failure.  CLI exit code 4.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace toolwear
