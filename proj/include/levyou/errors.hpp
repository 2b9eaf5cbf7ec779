#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace levyou {

// Invalid user input or parameters violating a documented precondition.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Runtime numerical failure (non-convergence, blow-up, non-finite values).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double achieved, double requested)
      : NumericError(what + " (achieved relative error " + format(achieved) + ", requested " + format(requested) + ")"),
        achieved_(achieved),
        requested_(requested) {}
  double achieved_tolerance() const noexcept { return achieved_; }
  double requested_tolerance() const noexcept { return requested_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }
  double achieved_;
  double requested_;
};

// Explicit time stepping left its stability region.
class StepSizeError : public NumericError {
 public:
  explicit StepSizeError(const std::string& what) : NumericError(what) {}
};

}  // namespace levyou
