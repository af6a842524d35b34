#pragma once

#include <stdexcept>
#include <string>

namespace biham {

/// Input that violates a documented precondition (shape, symmetry, parity,
/// positivity). The CLI maps this to exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy answer, e.g. a rank
/// decision landed inside the ambiguity band.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace biham
