#pragma once

#include <stdexcept>
#include <string>

namespace sns {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A triangulation violates a closed-manifold invariant.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Invalid input parameters (counts, radii, penalty weights, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A geometric quantity is undefined at the requested location.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// The level-set extraction produced an invalid surface.
class ExtractionError : public Error {
public:
    using Error::Error;
};

/// Mesh file parsing or invariant validation failed.
class LoadError : public Error {
public:
    using Error::Error;
};

/// Krylov breakdown or non-convergence.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Inconsistent simulation or CLI configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace sns
