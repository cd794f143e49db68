#pragma once

#include <stdexcept>
#include <string>

namespace fiwalk {

/// Malformed or inconsistent family description (schema, closure, params).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain: n below n_min, caps exceeded,
/// disconnected instances, periodic chains handed to mixing_time.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked identity or theorem-backed inequality failed. Always indicates a
/// bug or a spec that violates equivariance, never bad user input.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fiwalk
