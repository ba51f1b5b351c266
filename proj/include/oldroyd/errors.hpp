#pragma once

#include <stdexcept>
#include <string>

namespace oldroyd {

/// Input rejected by a precondition check (shape mismatch, bad parameter, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Negative power of Λ applied to a field whose mean mode is nonzero.
class ZeroModeSingularity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature failed to reach the requested relative tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Advective stability bound dt * max|u| * k_max <= 0.5 violated.
class CflViolation : public std::runtime_error {
 public:
  CflViolation(const std::string& what, double suggested_dt)
      : std::runtime_error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Non-finite value encountered while time stepping.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oldroyd
