#pragma once

#include <stdexcept>
#include <string>

namespace fedcontract {

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Structurally incompatible inputs: length or architecture mismatches,
/// weights that do not form a simplex.
class ContractError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Aggregation was asked to combine zero models.
class NoModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The sub-cube bisection could not reach the requested coverage quality.
class CalibrationError : public std::runtime_error {
public:
  CalibrationError(const std::string& what, double best_theta)
      : std::runtime_error(what), best_theta_(best_theta) {}
  double best_theta() const noexcept { return best_theta_; }

private:
  double best_theta_;
};

}  // namespace fedcontract
