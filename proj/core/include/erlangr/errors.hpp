#pragma once

#include <stdexcept>
#include <string>

namespace erlangr {

/// Input outside the mathematical domain of an operation (p = 1, r not in (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The holding model is not positive recurrent for the requested load.
class NotStable : public std::runtime_error {
 public:
  NotStable(double rho, double rho_max)
      : std::runtime_error("holding model not stable: rho=" + std::to_string(rho) +
                           " >= rho_max=" + std::to_string(rho_max)),
        rho_(rho),
        rho_max_(rho_max) {}

  double rho() const noexcept { return rho_; }
  double rho_max() const noexcept { return rho_max_; }

 private:
  double rho_;
  double rho_max_;
};

/// An iterative scheme hit its iteration cap before meeting tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear solve that should be well posed turned out singular.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The fixed-point heuristic has no admissible solution (holding model unstable in the limit).
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dimensioning target cannot be met with the pinned coordinate.
class InfeasibleTarget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A staffing schedule does not cover the requested horizon.
class ScheduleGap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace erlangr
