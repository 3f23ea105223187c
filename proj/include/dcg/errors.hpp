#pragma once

#include <stdexcept>
#include <string>

namespace dcg {

/// Base of every error raised by the library. The exit code is what the CLI
/// returns when the error escapes a verb.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Malformed input: bad descriptors, mismatched spaces, broken schemas.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what, 2) {}
};

/// Two objects that must live over the same space (or share radii) do not.
class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what) : Error(what, 2) {}
};

/// Argument outside the domain of an operation (empty family, empty set, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what, 2) {}
};

/// An enumeration or search exceeded its configured budget.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(what, 3) {}
};

/// A certified bound or structural invariant failed to hold on the data.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what) : Error(what, 4) {}
};

}  // namespace dcg
