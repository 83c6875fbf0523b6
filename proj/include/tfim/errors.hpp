#ifndef TFIM_ERRORS_HPP
#define TFIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tfim {

// Base for all library errors; the CLI maps these to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid physical or numerical parameters (preconditions, formula domains).
struct DomainError : Error {
    using Error::Error;
};

// A QuenchSpec invariant is violated; message names the first bad field.
struct ValidationError : DomainError {
    using DomainError::DomainError;
};

// Problem size outside what a method can handle (e.g. ED beyond N=14).
struct SizeError : DomainError {
    using DomainError::DomainError;
};

// Iterative scheme failed to reach its tolerance (quadrature, eigensolver).
struct ConvergenceError : Error {
    using Error::Error;
};

// Mismatched (t, d) grids passed to a two-series operation.
struct GridMismatchError : Error {
    using Error::Error;
};

// Fit window unusable (too few points, sign change, no oscillations).
struct FitError : Error {
    using Error::Error;
};

}  // namespace tfim

#endif
