#pragma once

#include <stdexcept>
#include <string>

namespace handcap {

// Base for every error raised by the library. Messages start with a short
// stable phrase ("degenerate image", "layout failure", ...) that callers and
// tests may match on.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace handcap
