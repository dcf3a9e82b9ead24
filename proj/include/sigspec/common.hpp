#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sigspec {

/// Planar coordinates in km.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

using Rng = std::mt19937_64;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its admissible domain.
struct ParameterError : Error {
    using Error::Error;
};

/// The requested operation is not defined for this correlation model.
struct UnsupportedModelError : Error {
    using Error::Error;
};

/// Duplicate or otherwise degenerate point configuration.
struct DegenerateConfigError : Error {
    using Error::Error;
};

/// Covariance factorization failed even with the maximum ridge.
struct IllConditionedError : Error {
    using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// A projected problem size the exact sampler cannot handle.
struct InfeasibleSizeError : Error {
    using Error::Error;
};

/// Monte Carlo estimation requested with too few replications.
struct InsufficientReplicationsError : Error {
    using Error::Error;
};

} // namespace sigspec
