#ifndef RANGEMOVE_ERROR_HPP
#define RANGEMOVE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rangemove {

/// Raised when a caller breaks a documented precondition (bad dimensions,
/// labels out of range, an interval that excludes the current label, ...).
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// A pairwise table handed to the exact solver is not convex on the span it
/// would be evaluated over.
class NonConvexPrior : public ContractViolation {
public:
    explicit NonConvexPrior(const std::string& what) : ContractViolation(what) {}
};

/// Brute-force enumeration refused because the state space exceeds the budget.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// A solver/prior combination whose monotonicity guarantee does not hold.
class SolverRefused : public std::runtime_error {
public:
    explicit SolverRefused(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed instance, image or DIMACS input.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ContractViolation(message);
}

} // namespace detail

} // namespace rangemove

#endif // RANGEMOVE_ERROR_HPP
