#pragma once

#include <stdexcept>

namespace qchain {

/// Invalid configuration, arguments or preconditions (CLI exit code 2).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integration diagnostics such as norm blow-up (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Auxiliary initial state violating the VL matching conditions (CLI exit code 4).
class IncompatibleStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qchain
