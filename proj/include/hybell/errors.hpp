#pragma once

#include <stdexcept>
#include <string>

namespace hybell {

// Base class for everything thrown on purpose by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Quadrature failed to reach the requested tolerance.
struct QuadratureError : Error {
    using Error::Error;
};

// Interval is empty, inverted, or numerically degenerate.
struct DegenerateBinning : Error {
    using Error::Error;
};

// A threshold search was asked to bracket a violation that never happens.
struct NoViolation : Error {
    using Error::Error;
};

// Iterative eigensolver or root finder ran out of iterations.
struct NonConvergence : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// State fixture file is missing, malformed, or too far from normalized.
struct FixtureError : Error {
    using Error::Error;
};

} // namespace hybell
