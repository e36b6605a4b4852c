#pragma once

#include <stdexcept>
#include <string>

namespace vemhr {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid mesh input: bad topology, degenerate cells, malformed files.
class MeshError : public Error {
public:
    using Error::Error;
};

/// Invalid user-supplied parameters or configuration.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Factorization failure or residual above tolerance.
class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace vemhr
