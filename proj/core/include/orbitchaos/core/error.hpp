#pragma once

#include <stdexcept>
#include <string>

namespace orbitchaos {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point, set or function was used on a state space it does not belong to.
class DomainMismatch : public Error {
public:
    using Error::Error;
};

/// A truncated product-space point does not carry enough coordinates to
/// answer a query exactly.
class TruncationUnderflow : public Error {
public:
    using Error::Error;
};

/// Dyadic resolution would exceed the supported integer range.
class ResolutionOverflow : public Error {
public:
    using Error::Error;
};

/// No closed form exists for the requested set on this system.
class UnsupportedSet : public Error {
public:
    using Error::Error;
};

/// A chaoticity computation needs the stationary-limit integral and none was
/// supplied or derivable.
class MissingStationaryLimit : public Error {
public:
    using Error::Error;
};

class ArityError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class NonIntegrable : public Error {
public:
    using Error::Error;
};

class DegenerateSample : public Error {
public:
    using Error::Error;
};

}  // namespace orbitchaos
