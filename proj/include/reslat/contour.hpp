#pragma once

#include <functional>
#include <span>

#include "reslat/path.hpp"
#include "reslat/quadrature.hpp"

namespace reslat {

struct ActionValue {
  Complex value;
  double est_error = 0.0;
  int n_evals = 0;
};

// Integrand in terms of the point x and the tracked branch value F(x).
using TrackedIntegrand = std::function<Complex(Complex x, Complex F)>;

struct TrackedOptions {
  double tol = 1e-10;
  double min_distance = 1e-9;
  int max_evals = 400000;
  // Index of the tracker factor sitting at the last vertex, or -1.  The last
  // segment then uses x = p + (q − p)(1 − (1 − s)²), which removes a
  // square-root endpoint singularity.
  int end_root = -1;
};

// ∫ f(x, F(x)) dx along the polyline from tracker.point() through route.
// The tracker is taken by value; the caller's state does not move.
ActionValue integrate_tracked(BranchTracker tracker, std::span<const Complex> route, const TrackedIntegrand& f,
                              const TrackedOptions& opt, ComplexPath* record = nullptr);

}  // namespace reslat
