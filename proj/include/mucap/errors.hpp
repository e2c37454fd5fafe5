#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mucap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (x = 0 for Ei,
// rho <= 0 for waterfilling, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

// Matrix failed a positive-definiteness / full-rank requirement. Carries the
// offending smallest eigenvalue (or singular value) for diagnostics.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double min_eig)
        : Error(what), min_eigenvalue(min_eig) {}
    double min_eigenvalue;
};

// Geometry does not admit the requested precoder (e.g. BD null space too small).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_obj, long iters)
        : Error(what), last_objective(last_obj), iterations(iters) {}
    double last_objective;
    long iterations;
};

// Config-file syntax error with source position (1-based).
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line_, int col_)
        : Error(what), line(line_), col(col_) {}
    int line;
    int col;
};

// Invariant violations collected by config validation.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::vector<std::string> violations_)
        : Error(what), violations(std::move(violations_)) {}
    std::vector<std::string> violations;
};

// Too many per-trial failures, unknown metric, and similar harness-level faults.
class ExperimentError : public Error {
public:
    using Error::Error;
};

} // namespace mucap
