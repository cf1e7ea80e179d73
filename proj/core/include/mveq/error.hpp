#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mveq {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the expression parser; carries the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Evaluation left the mathematical domain (ln of a non-positive value,
/// division by zero, non-finite intermediate, point outside a Func1D domain).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A candidate generator's derivative changed sign on the sweep.
class MonotonicityError : public Error {
public:
    using Error::Error;
};

/// Numeric inversion of a generator failed (target outside range, no bracket).
class InversionError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid input: bad FamilySpec, malformed interval or plan,
/// malformed samples file.
class SpecError : public Error {
public:
    using Error::Error;
};

} // namespace mveq
