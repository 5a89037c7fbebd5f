#pragma once

#include <stdexcept>
#include <string>

namespace hpmod {

enum class ErrorCode {
    InvalidParameter,
    Domain,
    NonConvergence,
    Divergence,
    Collinear,
    Pole,
    InvalidCenter,
    OnBoundary,
    InvalidGeometry,
    UnsupportedParameter,
    Meshing,
    InvertedElement,
    Assembly,
    Solver,
    Location,
    Evaluation,
    Parse,
};

const char* to_string(ErrorCode code);

/// Base exception for everything thrown by the library. The code is stable and
/// is what the CLI prints in its diagnostics.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Thrown when an iteration hits its cap; carries the last iterate.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double partial, long iterations)
        : Error(ErrorCode::NonConvergence, what), partial_(partial), iterations_(iterations) {}

    double partial_value() const noexcept { return partial_; }
    long iterations() const noexcept { return iterations_; }

private:
    double partial_;
    long iterations_;
};

}  // namespace hpmod
