#pragma once

#include <stdexcept>
#include <string>

namespace stcast {

// Error taxonomy shared by the library and the CLI exit-code mapping:
// ConfigError -> 2, DataError -> 3, NumericError -> 4.

// Invalid parameters, flags, or configuration files.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or out-of-contract input data (parse failures, bounds, shapes).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failures at run time (instability, divergence, non-finite values).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace stcast
