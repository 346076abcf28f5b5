#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nhpc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition on an argument violated (bad interval order, index out of range, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

class InvalidScenario : public Error {
public:
    explicit InvalidScenario(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Adaptive quadrature ran out of depth before reaching the requested tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_estimate, double error_bound)
        : Error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}
    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_estimate_;
    double error_bound_;
};

// An extended-range value does not fit in a double, or a ratio by zero was requested.
class RangeError : public Error {
public:
    using Error::Error;
};

// Conditioning on an event of probability zero.
class NullEventError : public Error {
public:
    using Error::Error;
};

// Too few Monte Carlo replicates satisfy a conditioning event.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Ratio estimator weights collapsed onto too few replicates to be trusted.
class TailUnreliableError : public Error {
public:
    using Error::Error;
};

}  // namespace nhpc
