#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsub {

// Error taxonomy shared by the library and the CLI exit-code mapping:
// usage/shape/domain -> 2, I/O and parsing -> 3, numeric/progress -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : Error {
    using Error::Error;
};

struct ShapeError : UsageError {
    using UsageError::UsageError;
};

struct DomainError : UsageError {
    using UsageError::UsageError;
};

struct IoError : Error {
    using Error::Error;
};

struct ParseError : IoError {
    ParseError(const std::string& what, std::size_t byte_offset)
        : IoError(what + " (byte " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    std::size_t offset;
};

struct NumericError : Error {
    using Error::Error;
};

}  // namespace rsub
