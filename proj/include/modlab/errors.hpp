#ifndef MODLAB_ERRORS_HPP
#define MODLAB_ERRORS_HPP

#include <limits>
#include <stdexcept>
#include <string>

namespace modlab {

/// Precondition or argument validation failure.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies outside the domain (or image) of a mapping.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Analytic chart is singular at the requested point (e.g. the winding axis).
class ChartSingularity : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A curve never passes from one bounding sphere of a ring to the other.
class NoCrossing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two preimage branches are too close to continue a lift deterministically.
class LiftingAmbiguity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A theorem hypothesis (finite L1 weight, finite limit value) does not hold.
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverBudgetExceeded : public std::runtime_error {
 public:
  SolverBudgetExceeded(const std::string& what, double best_upper_bound)
      : std::runtime_error(what), best_upper_bound_(best_upper_bound) {}

  /// Modulus of the best feasible density found before the budget ran out
  /// (infinity when no feasible density was reached).
  double best_upper_bound() const noexcept { return best_upper_bound_; }

 private:
  double best_upper_bound_ = std::numeric_limits<double>::infinity();
};

}  // namespace modlab

#endif  // MODLAB_ERRORS_HPP
