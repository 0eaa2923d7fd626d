#pragma once

#include <stdexcept>
#include <string>

namespace tecgp {

/// Invalid configuration or command-line usage.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed, missing or out-of-range input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tecgp
