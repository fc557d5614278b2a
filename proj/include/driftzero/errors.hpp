#pragma once

#include <stdexcept>
#include <string>

namespace dz {

/// Raised when a request exceeds the compute/memory guards (CLI exit code 3).
class resource_guard_error : public std::runtime_error {
 public:
  explicit resource_guard_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dz
