/// @file  errors.hpp
/// @brief Exception types thrown by the library.

#pragma once

#include <stdexcept>
#include <string>

namespace trilens {

/// Base class of all library errors. Data/usage problems derive from this;
/// numerical failures use NoConvergence so callers can distinguish them.
struct Error : std::runtime_error {
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

struct DuplicateMember : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct IdOutOfRange : Error {
    using Error::Error;
};

struct WrongKind : Error {
    using Error::Error;
};

struct MixedKinds : Error {
    using Error::Error;
};

struct CountExceedsTriples : Error {
    using Error::Error;
};

struct TooLarge : Error {
    using Error::Error;
};

struct DisconnectedGraph : Error {
    using Error::Error;
};

struct BadCovariance : Error {
    using Error::Error;
};

struct EmptyCollection : Error {
    using Error::Error;
};

struct EmptyClass : Error {
    using Error::Error;
};

struct UnknownLabel : Error {
    using Error::Error;
};

struct ErrorProbTooLarge : Error {
    using Error::Error;
};

struct BadSigma : Error {
    using Error::Error;
};

struct IsolatedVertices : Error {
    using Error::Error;
};

struct SizeMismatch : Error {
    using Error::Error;
};

struct KeyMismatch : Error {
    using Error::Error;
};

struct DegenerateObjective : Error {
    using Error::Error;
};

/// Numerical failure (iteration caps, residual bounds). Mapped to a
/// distinct exit code by the CLI.
struct NoConvergence : Error {
    using Error::Error;
};

}  // namespace trilens
