#pragma once

#include <stdexcept>
#include <string>

namespace crackpot {

// Base class for all library errors. Messages name the module and
// operation that raised them, e.g. "imgproc.canny_edges: low must be < high".
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller violated an operation's contract (bad dimensions, bad range, ...).
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

// A required file or directory does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

// A file exists but its contents are malformed. For binary formats the
// byte offset of the first rejected byte is carried when known.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg, long long offset = -1)
        : Error(offset >= 0 ? msg + " (offset " + std::to_string(offset) + ")" : msg),
          offset_(offset) {}

    long long offset() const { return offset_; }

private:
    long long offset_;
};

// Bad command line or config file; maps to process exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace crackpot
