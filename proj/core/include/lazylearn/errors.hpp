#pragma once

#include <stdexcept>
#include <string>

namespace lazylearn {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read fully, or written.
class io_error : public error {
public:
    using error::error;
};

// Byte-level container violations (wrong magic number, bad layout).
class format_error : public error {
public:
    using error::error;
};

// Two inputs that must agree do not (e.g. image/label counts).
class consistency_error : public error {
public:
    using error::error;
};

// Tensor or vector dimensions do not match.
class shape_error : public error {
public:
    using error::error;
};

// A parameter or configuration value violates its contract.
class invalid_input : public error {
public:
    using error::error;
};

// An operation was called on an object in the wrong state.
class state_error : public error {
public:
    using error::error;
};

// A non-finite value surfaced where finite math was required.
class numeric_error : public error {
public:
    using error::error;
};

} // namespace lazylearn
