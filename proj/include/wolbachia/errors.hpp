#pragma once

#include <stdexcept>
#include <string>

namespace wolbachia {

/// Input lies outside the region where the model is defined (extinct human
/// population, no males for the Jacobian, time outside the horizon, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A right-hand side evaluation produced a non-finite value.
class ComputationError : public std::runtime_error {
 public:
  ComputationError(const std::string& what, std::string compartment)
      : std::runtime_error(what), compartment_(std::move(compartment)) {}

  const std::string& compartment() const noexcept { return compartment_; }

 private:
  std::string compartment_;
};

/// Raised by the integrators. `day` is the integration time at failure.
class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { StepLimit, StepUnderflow, Positivity, NonFinite };

  IntegrationError(Kind kind, double day, std::string compartment,
                   const std::string& what)
      : std::runtime_error(what),
        kind_(kind),
        day_(day),
        compartment_(std::move(compartment)) {}

  Kind kind() const noexcept { return kind_; }
  double day() const noexcept { return day_; }
  const std::string& compartment() const noexcept { return compartment_; }

 private:
  Kind kind_;
  double day_;
  std::string compartment_;
};

/// Malformed or inconsistent scenario / problem definition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The optimizer hit its iteration cap or could not produce a feasible point.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wolbachia
