#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcclear {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text: JSON syntax, wrong field types, bad numbers.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::string location = {})
        : Error(location.empty() ? message : location + ": " + message), location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

/// Well-formed input that violates a model rule (admissibility, bid feasibility).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message, std::vector<std::string> details = {})
        : Error(message), details_(std::move(details)) {}

    const std::vector<std::string>& details() const noexcept { return details_; }

private:
    std::vector<std::string> details_;
};

class SolverError : public Error {
public:
    using Error::Error;
};

/// A fixed-point iteration ran out of iterations; carries the last iterate.
class ConvergenceError : public SolverError {
public:
    ConvergenceError(const std::string& message, std::vector<double> last_iterate, double residual,
                     std::size_t iterations)
        : SolverError(message),
          last_iterate_(std::move(last_iterate)),
          residual_(residual),
          iterations_(iterations) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::vector<double> last_iterate_;
    double residual_;
    std::size_t iterations_;
};

/// An exhaustive enumeration would exceed its configured candidate budget.
class BudgetExceededError : public SolverError {
public:
    BudgetExceededError(const std::string& message, double required, double budget)
        : SolverError(message), required_(required), budget_(budget) {}

    double required() const noexcept { return required_; }
    double budget() const noexcept { return budget_; }

private:
    double required_;
    double budget_;
};

}  // namespace bcclear
