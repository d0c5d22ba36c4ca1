#pragma once

#include <stdexcept>
#include <string>

namespace nmgauss {

// Thrown when user-supplied parameters violate a documented precondition.
// CLI maps this to exit code 2.
class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when a computation cannot reach its accuracy target (non-finite
// intermediate, non-converged quadrature cell, failed factorization).
// CLI maps this to exit code 3.
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a requested computation would exceed its work budget.
// CLI maps this to exit code 4.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Advisory error: evaluation point lies outside the central lattice region
// where the expansion is quoted. Callers may force evaluation for diagnostics.
class OutOfBulk : public std::runtime_error {
public:
    explicit OutOfBulk(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nmgauss
