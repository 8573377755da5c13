#pragma once

#include <stdexcept>
#include <string>

namespace depspec {

// Requested dimension exceeds the cap of the chosen computation path.
class dimension_cap_error : public std::runtime_error {
 public:
  explicit dimension_cap_error(const std::string& what) : std::runtime_error(what) {}
};

// Two arguments that must share a dimension do not.
class dimension_mismatch_error : public std::invalid_argument {
 public:
  explicit dimension_mismatch_error(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace depspec
