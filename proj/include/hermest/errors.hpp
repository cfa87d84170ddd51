#pragma once

#include <stdexcept>
#include <string>

namespace hermest {

// Rejected configuration or precondition violation (CLI exit code 3).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while computing (I/O, degenerate data, numerical breakdown; CLI exit code 1).
class runtime_failure : public std::runtime_error {
public:
    explicit runtime_failure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hermest
