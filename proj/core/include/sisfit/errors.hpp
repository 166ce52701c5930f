#pragma once

#include <stdexcept>
#include <string>

namespace sisfit {

/// Raised when an argument violates a documented precondition.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative routine fails to converge or produces non-finite output.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sisfit
