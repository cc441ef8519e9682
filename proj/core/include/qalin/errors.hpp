#pragma once

#include <stdexcept>
#include <string>

namespace qalin {

/// Raised when the equation a*x = b has no usable scale (a == 0).
class DegenerateProblem : public std::domain_error {
 public:
  explicit DegenerateProblem(const std::string& what) : std::domain_error(what) {}
};

/// Raised when an enumeration would exceed the supported size.
class ResourceLimit : public std::length_error {
 public:
  explicit ResourceLimit(const std::string& what) : std::length_error(what) {}
};

}  // namespace qalin
