#pragma once

#include <stdexcept>
#include <string>

namespace slnorm {

// Base class for all solver-specific failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the admissible domain (coordinates outside [0, pi],
// boundary angles outside (0, pi), inconsistent grid sizes, ...).
struct DomainError : Error {
    using Error::Error;
};

// Malformed expression or config text.  The message carries the offending
// position or field path.
struct ParseError : Error {
    using Error::Error;
};

// Adaptive ODE integration failed (step-size underflow or step budget
// exhausted); `where` is the x-coordinate at which the failure occurred.
struct IntegrationError : Error {
    IntegrationError(const std::string& msg, double x) : Error(msg), where(x) {}
    double where;
};

// A quadrature or series evaluation could not reach the requested tolerance;
// `achieved` is the error estimate that was actually attained.
struct AccuracyError : Error {
    AccuracyError(const std::string& msg, double est) : Error(msg), achieved(est) {}
    double achieved;
};

// Eigenvalue bracketing ran past its search ceiling.
struct SearchError : Error {
    using Error::Error;
};

// Too few usable sample points to form a diagnostic (e.g. every probe point
// sits on a node of the eigenfunction).
struct SamplingError : Error {
    using Error::Error;
};

} // namespace slnorm
