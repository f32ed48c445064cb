#pragma once

#include <stdexcept>
#include <string>

namespace lrpop {

// Malformed or out-of-contract input (bad JSON, dimension mismatch, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A dense expansion would exceed the configured term budget.
class BudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

// The relaxation order cannot accommodate some constraint or the objective.
class OrderTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Graph, clique tree and constraint system do not fit together.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lrpop
