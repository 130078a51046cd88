#pragma once

#include <stdexcept>
#include <string>

namespace actplace {

// Error categories double as CLI exit-code classes.
enum class ErrorKind {
  dimension,
  invalid_input,
  parameter,
  stability,
  infeasible,
  controllability,
  certification,
  size,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when the energy bound is below what even full actuation achieves.
/// `floor` carries the smallest attainable value of the violated metric.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double floor)
      : Error(ErrorKind::infeasible, what), floor_(floor) {}
  double floor() const noexcept { return floor_; }

 private:
  double floor_;
};

class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double rightmost_real_part)
      : Error(ErrorKind::stability, what), rightmost_(rightmost_real_part) {}
  double rightmost_real_part() const noexcept { return rightmost_; }

 private:
  double rightmost_;
};

}  // namespace actplace
