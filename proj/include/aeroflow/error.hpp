#pragma once

#include <stdexcept>
#include <string>

namespace aeroflow {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Degenerate or invalid geometry (antipodal slerp, off-sphere input, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

// Invalid configuration or flag combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Data-integrity failure in an input stream or file; messages name the
// offending row/line where possible.
class DataError : public Error {
public:
    using Error::Error;
};

// Numerical failure (non-convergent fit, invalid model for the data).
class FitError : public Error {
public:
    using Error::Error;
};

} // namespace aeroflow
