#pragma once

#include <stdexcept>
#include <string>

namespace truckpark {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value violates an invariant. The message names the field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Messages carry the line number when one applies.
class ParseError : public Error {
public:
    using Error::Error;
};

/// An event log or series breaks one of its structural invariants.
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace truckpark
