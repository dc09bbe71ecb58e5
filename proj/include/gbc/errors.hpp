#pragma once

#include <stdexcept>

namespace gbc {

/// Thrown when user-supplied parameters violate a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative solver cannot locate or refine a solution.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gbc
