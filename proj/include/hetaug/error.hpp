#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hetaug {

// Input file could not be parsed. line() is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class NotFoundError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Contradictory inputs, e.g. an account typed both EOA and CA.
class ConflictError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration or inputs that do not fit together.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace hetaug
