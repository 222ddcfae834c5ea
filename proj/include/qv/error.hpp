#pragma once

#include <stdexcept>
#include <string>

namespace qv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension/multiplicity mismatch, malformed grids, out-of-range options.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A tuple lies outside half the splitting distance of the reference tuple.
class SplitRadiusError : public Error {
public:
    using Error::Error;
};

class FrameError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw InvalidInput(what);
}

} // namespace detail
} // namespace qv
