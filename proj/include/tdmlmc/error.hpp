#pragma once

#include <stdexcept>
#include <string>

namespace tdmlmc {

// Malformed arguments: dimension mismatch, out-of-range index, bad schedule.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The operation needs metadata the integrand does not carry.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Zero variance where a positive one is required.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or unknown configuration key; CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// Non-finite result in a computed cell; CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tdmlmc
