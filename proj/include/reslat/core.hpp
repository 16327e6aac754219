#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace reslat {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

enum class ErrorKind {
  invalid_argument,
  turning_point_proximity,
  quadrature_failure,
  no_real_turning_points,
  branch_ambiguity,
  continuation_failure,
  order_too_high,
  monotonicity_violation,
  convergence_failure,
  no_convergence,
  non_simple_root,
  empty_band,
  step_underflow,
  no_plateau,
  series_divergence,
  window_empty,
  matching_failure,
};

std::string_view to_string(ErrorKind kind);

// Every numeric failure in the library is reported through this type; the
// kind tells the caller what to change (path, tolerance, regime).
class NumericError : public std::runtime_error {
 public:
  NumericError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw NumericError(kind, what);
}

// (E, h, ν̃) with ν = ν̃·h.  ν̃ must be a positive half-integer.
struct ModelParams {
  Complex E;
  double h = 0.0;
  double nu_tilde = 0.5;
  double nu = 0.0;

  static ModelParams make(Complex E, double h, double nu_tilde);
  ModelParams with_energy(Complex e) const { return make(e, h, nu_tilde); }
};

bool is_half_integer(double v);

}  // namespace reslat
