#pragma once

#include <stdexcept>
#include <string>

namespace qimpute {

// Every failure raised by the library derives from Error. The CLI maps the
// three concrete kinds onto distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or missing configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Unreadable, malformed or inconsistent input data, and I/O failures.
class DataError : public Error {
public:
    using Error::Error;
};

// The angle search could not produce a usable result.
class OptimizationError : public Error {
public:
    using Error::Error;
};

// Real part of a rotated state vanished; the angle is unusable for this row.
class RotationError : public Error {
public:
    using Error::Error;
};

} // namespace qimpute
