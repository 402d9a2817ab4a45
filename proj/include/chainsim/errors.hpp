#pragma once

#include <stdexcept>
#include <string>

namespace chainsim {

/// Thrown when an operation is handed inputs that violate its contract.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Absolute tolerance for nonnegativity clamps on physical quantities.
/// Values in [-kNonnegTol, 0) are treated as exact zeros; anything below
/// that is a contract violation, not rounding noise.
inline constexpr double kNonnegTol = 1e-12;

inline double require_nonneg(double x, const char* what) {
  if (x < -kNonnegTol) {
    throw ContractViolation(std::string(what) + " must be nonnegative, got " + std::to_string(x));
  }
  return x < 0.0 ? 0.0 : x;
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

}  // namespace chainsim
