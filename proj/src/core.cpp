#include "reslat/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "reslat/parallel.hpp"

namespace reslat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::turning_point_proximity: return "TurningPointProximity";
    case ErrorKind::quadrature_failure: return "QuadratureFailure";
    case ErrorKind::no_real_turning_points: return "NoRealTurningPoints";
    case ErrorKind::branch_ambiguity: return "BranchAmbiguity";
    case ErrorKind::continuation_failure: return "ContinuationFailure";
    case ErrorKind::order_too_high: return "OrderTooHigh";
    case ErrorKind::monotonicity_violation: return "MonotonicityViolation";
    case ErrorKind::convergence_failure: return "ConvergenceFailure";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::non_simple_root: return "NonSimpleRoot";
    case ErrorKind::empty_band: return "EmptyBand";
    case ErrorKind::step_underflow: return "StepUnderflow";
    case ErrorKind::no_plateau: return "NoPlateau";
    case ErrorKind::series_divergence: return "SeriesDivergence";
    case ErrorKind::window_empty: return "WindowEmpty";
    case ErrorKind::matching_failure: return "MatchingFailure";
  }
  return "Unknown";
}

bool is_half_integer(double v) {
  const double twice = 2.0 * v;
  return v > 0.0 && std::abs(twice - std::round(twice)) < 1e-12 &&
         static_cast<long long>(std::llround(twice)) % 2 == 1;
}

ModelParams ModelParams::make(Complex E, double h, double nu_tilde) {
  if (!(h > 0.0)) fail(ErrorKind::invalid_argument, "h must be positive");
  if (!is_half_integer(nu_tilde)) fail(ErrorKind::invalid_argument, "nu_tilde must be a positive half-integer");
  return {E, h, nu_tilde, nu_tilde * h};
}

unsigned worker_count(unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RES_LAT_THREADS")) {
      const int cap = std::atoi(env);
      if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
  }
  return std::max(1u, n);
}

}  // namespace reslat
