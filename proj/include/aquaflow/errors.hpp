#pragma once

#include <stdexcept>
#include <string>

namespace aquaflow {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct ConfigMismatch : Error {
    using Error::Error;
};

struct FrameTooSmall : Error {
    using Error::Error;
};

struct UnsupportedFormat : Error {
    using Error::Error;
};

// A frame failed to decode; message carries the frame index / path.
struct CorruptFrame : Error {
    using Error::Error;
};

struct DimensionChange : Error {
    using Error::Error;
};

struct EmptySource : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace aquaflow
