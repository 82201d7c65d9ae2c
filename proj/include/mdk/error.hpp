#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdk {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when no line applies.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Argument outside an operation's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Query outside a tabulated span (no extrapolation).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Pattern with zero radiated power, or otherwise unusable for a ratio metric.
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace mdk
