#pragma once

#include <stdexcept>
#include <string>

namespace sdelab {

/// Bad parameters, malformed ids, unreadable/unwritable files. CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values, quadrature breakdown, degenerate fits. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sdelab
