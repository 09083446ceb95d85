#pragma once

#include <stdexcept>
#include <string>

namespace trapqa {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (z <= 0, Y = 0, nonpositive rate...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Query outside a tabulated or calibrated range. No extrapolation is done.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Unknown electrode / net / site identifier.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration. `pointer` is a JSON pointer (or file path) locating the problem.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string pointer = {})
        : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

/// Nonlinear fit failed to converge.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace trapqa
