#pragma once

#include <stdexcept>
#include <string>

namespace privauction {

// Bad CLI usage / unknown option values. Exit code 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// A precondition on parameters or configuration is violated (e.g. s <= m).
// Exit code 3.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// The problem instance itself is invalid for the requested operation.
// Exit code 3.
struct InstanceError : std::runtime_error {
  explicit InstanceError(const std::string& msg) : std::runtime_error(msg) {}
};

// An internal guard tripped (state-space bound, non-termination guard,
// malformed billboard). Exit code 4.
struct GuardError : std::runtime_error {
  explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace privauction
