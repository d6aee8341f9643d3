#pragma once

#include <stdexcept>
#include <string>

namespace lrx {

// Bad input: malformed state, unknown tag, violated precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The requested run does not fit the memory budget or the supported size range.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Correlation of a constant (or too short) series.
class UndefinedCorrelation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace lrx
