#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace theta_strata {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: bad indices, bad degree vectors, violated preconditions.
class DomainError : public Error {
public:
    using Error::Error;
};

// Exhaustive enumeration refused because the instance is too large.
class SizeError : public Error {
public:
    using Error::Error;
};

// A computation would exceed the rank-computation budget.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, std::uint64_t cost, std::uint64_t budget)
        : Error(what + " (cost " + std::to_string(cost) + " > budget " + std::to_string(budget) + ")"),
          cost_(cost), budget_(budget) {}

    std::uint64_t cost() const { return cost_; }
    std::uint64_t budget() const { return budget_; }

private:
    std::uint64_t cost_;
    std::uint64_t budget_;
};

// Two routes that must agree did not. Always a bug, never bad input.
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace theta_strata
