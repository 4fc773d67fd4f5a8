#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace maxclaim {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter or argument lies outside its admissible domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Density-type evaluation requested on the boundary of the unit square.
class BoundaryError : public Error {
public:
    using Error::Error;
};

// An iterative numerical routine failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Malformed or invalid input data (CSV rows, non-positive claims, ...).
class DataError : public Error {
public:
    using Error::Error;
};

// No optimizer start converged. Carries the best point seen.
class OptimizationError : public Error {
public:
    OptimizationError(const std::string& what, std::vector<double> best_point, double best_value)
        : Error(what), best_point_(std::move(best_point)), best_value_(best_value) {}

    const std::vector<double>& best_point() const { return best_point_; }
    double best_value() const { return best_value_; }

private:
    std::vector<double> best_point_;
    double best_value_;
};

} // namespace maxclaim
