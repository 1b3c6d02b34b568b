#pragma once

#include <stdexcept>
#include <string>

namespace deltawell {

/// An argument lies outside the domain of the operation it was passed to.
class ParameterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed: no convergence, a broken invariant, or a
/// result that does not survive its own consistency check.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace deltawell
