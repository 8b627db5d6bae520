#pragma once

#include <stdexcept>
#include <string>

namespace nearcrit {

// Bad input: malformed window, invalid parameter, precondition violated.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A Monte Carlo decision could not be reached within the sample budget.
struct Undecided : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact search refused because the instance is too large.
struct TooManyHoles : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A scale backend was queried outside the range where it is defined.
struct BackendDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nearcrit
