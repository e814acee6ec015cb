#pragma once

#include <stdexcept>
#include <string>

namespace sparec {

// Length/shape disagreement between a value vector and its point set.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// A numeric argument outside its admissible range (weights, exponents, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A requested frequency cannot be represented on the reference grid.
class AliasingError : public std::invalid_argument {
 public:
  explicit AliasingError(const std::string& what) : std::invalid_argument(what) {}
};

// Combinatorial enumeration would exceed the configured subset budget.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Linearly dependent basis where independence is required.
class DegeneracyError : public std::runtime_error {
 public:
  explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sparec
