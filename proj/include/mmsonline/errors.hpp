#pragma once

#include <stdexcept>
#include <string>

namespace mmsonline {

/// Malformed user input (files, parameters, out-of-range indices).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The exact solver was asked for an instance beyond its configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An allocation or policy output broke a structural rule (overlap, bad item).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked algorithm invariant failed. Carries the seed that reproduces it.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(const std::string& what, unsigned long long seed = 0)
      : std::runtime_error(what), seed_(seed) {}
  unsigned long long seed() const { return seed_; }

 private:
  unsigned long long seed_;
};

}  // namespace mmsonline
