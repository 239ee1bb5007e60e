#pragma once

#include <stdexcept>
#include <string>

namespace twistlab {

// Bad input to a library call (precondition violated).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numeric procedure failed or a state invariant does not hold.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dense Dicke-basis storage would exceed the configured cap; callers should
// fall back to the closed-form observables.
class DimensionOverflow : public std::length_error {
public:
    using std::length_error::length_error;
};

}  // namespace twistlab
