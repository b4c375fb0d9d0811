#pragma once

#include <stdexcept>
#include <string>

namespace rydberg {

/// A numerical procedure (root bracketing, adaptive quadrature) failed to
/// reach its tolerance. Domain errors use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace rydberg
