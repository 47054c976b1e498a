#pragma once

#include <stdexcept>
#include <string>

namespace podsim::petri {

/// Net definition or marking violates a structural rule (dangling arc,
/// unknown place, guard over an unbound variable, ...).
struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// Initial marking refers to an unknown place or carries a token whose
/// shape does not match the place schema.
struct MarkingError : std::runtime_error {
  explicit MarkingError(const std::string& what) : std::runtime_error(what) {}
};

/// fire() was asked to fire a (transition, binding) pair that is not
/// enabled at the current clock.
struct NotEnabled : std::runtime_error {
  explicit NotEnabled(const std::string& what) : std::runtime_error(what) {}
};

/// The configured max-event budget was exhausted before the stop
/// condition was reached.
struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// An inscription expression was evaluated over incompatible value types.
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace podsim::petri
