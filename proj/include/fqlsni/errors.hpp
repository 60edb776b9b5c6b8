#pragma once

#include <stdexcept>
#include <string>

namespace fqlsni {

/// Input outside the mathematical domain of an operation (non-finite values,
/// non-positive frequencies, mismatched dimensions).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid parameter set or scenario file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// cos(roll)·cos(pitch) too close to zero for the altitude channel inversion.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The simulated vehicle left the region where the linearizing law is valid.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weighted average requested with zero total weight.
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace fqlsni
