#pragma once

#include <stdexcept>
#include <string>

namespace besovkit {

// Base error for every failure raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters, malformed input files, precondition violations.
class ConfigError : public Error {
public:
    using Error::Error;
};

// The geometry of an instance does not admit the requested construction.
class GeometryError : public Error {
public:
    using Error::Error;
};

}  // namespace besovkit
