#pragma once

#include <stdexcept>
#include <string>

namespace tadp {

/// Raised for malformed or inconsistent experiment configuration (CLI exit 2).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised for unreadable or malformed data files (CLI exit 3).
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tadp
