#pragma once

#include <stdexcept>
#include <string>

namespace slicebench {

/// Base class for every error the library reports. `kind()` is a stable
/// machine-readable tag (used in persisted records and HTTP payloads).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A frontend/flow mismatch or violated internal contract. Indicates a bug.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& message) : Error("InternalError", message) {}
};

}  // namespace slicebench
