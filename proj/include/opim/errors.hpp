#pragma once

#include <stdexcept>
#include <string>

namespace opim {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Expression text could not be parsed. Positions are 1-based; for an
// unexpected end of input the position points one past the last character.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : Error(msg + " at position " + std::to_string(position)),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Evaluation failed: division by zero, ln of a non-positive argument, or a
// variable/parameter that has no binding.
class EvalError : public Error {
public:
    using Error::Error;
};

// Series arithmetic violated a structural rule: mismatched domains or degree
// caps, or an antiderivative that would exceed the cap.
class SeriesError : public Error {
public:
    using Error::Error;
};

// The problem falls outside the supported family, e.g. a correction equation
// whose left-side coefficients are not constants.
class UnsupportedProblemError : public Error {
public:
    using Error::Error;
};

// The 2x2 boundary system for a correction solve is (numerically) singular,
// i.e. the homogeneous solutions cannot match the stated conditions.
class ResonanceError : public Error {
public:
    using Error::Error;
};

// Every Newton start failed. Carries diagnostics for the CLI exit path.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& msg, int starts_tried, double best_residual)
        : Error(msg), starts_tried_(starts_tried), best_residual_(best_residual) {}
    int starts_tried() const noexcept { return starts_tried_; }
    double best_residual() const noexcept { return best_residual_; }

private:
    int starts_tried_;
    double best_residual_;
};

// The bracketing interval for a root contains no sign change.
class NoRealRootError : public Error {
public:
    using Error::Error;
};

// An initial value integration blew up. `last_x` is the largest grid point
// at which the state was still finite.
class OverflowError : public Error {
public:
    OverflowError(const std::string& msg, double last_x)
        : Error(msg), last_x_(last_x) {}
    double last_x() const noexcept { return last_x_; }

private:
    double last_x_;
};

// Newton iteration on a boundary value grid diverged.
class DivergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace opim
