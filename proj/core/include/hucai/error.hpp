#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hucai {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative solve did not reach its tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}

    /// Relative residual after every iteration.
    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// Non-finite values appeared during time integration.
class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, double t) : Error(what), t_(t) {}
    double time() const noexcept { return t_; }

private:
    double t_;
};

}  // namespace hucai
