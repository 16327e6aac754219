#pragma once

#include <vector>

#include "reslat/core.hpp"

namespace reslat {

struct SegmentQuadrature {
  int n_evals = 0;
  double est_error = 0.0;
};

// Piecewise-linear contour.  segment_info is filled by integrators.
struct ComplexPath {
  std::vector<Complex> vertices;
  std::vector<SegmentQuadrature> segment_info;

  ComplexPath() = default;
  ComplexPath(std::initializer_list<Complex> v) : vertices(v) {}
  explicit ComplexPath(std::vector<Complex> v) : vertices(std::move(v)) {}

  std::size_t segments() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  Complex front() const { return vertices.front(); }
  Complex back() const { return vertices.back(); }
  double length() const;
  ComplexPath reversed() const;
};

// Distance from a to the closed segment [p, q].
double segment_distance(Complex a, Complex p, Complex q);

// Continuous branch of F(x) = exp(c)·Π (x − a_k)^{e_k}.  The argument of
// each factor is unwrapped exactly along straight moves, so the branch is
// fixed by the path travelled and never by a picture of the cuts.
class BranchTracker {
 public:
  struct Factor {
    Complex root;
    double exponent;
  };

  // phase_quantum: the smallest phase by which two branches of F differ
  // (π for a square root, π/2 for a fourth root).
  BranchTracker(std::vector<Factor> factors, Complex log_prefactor, double phase_quantum, Complex start);

  Complex point() const { return point_; }
  Complex log_value() const;
  Complex value() const;
  const std::vector<Factor>& factors() const { return factors_; }
  // Value reached by a straight move to q, without moving.
  Complex log_value_at(Complex q) const;
  Complex value_at(Complex q) const { return std::exp(log_value_at(q)); }

  // Straight move to q.  Throws turning_point_proximity if the segment passes
  // within min_distance of a root other than `exempt` (a root the move is
  // allowed to approach along a ray, used for endpoint singularities).
  void advance_to(Complex q, double min_distance, int exempt = -1);
  void advance_along(const std::vector<Complex>& route, double min_distance);
  // Re-express the state at the same point after the roots moved
  // continuously (parameter continuation at a fixed point).
  void move_roots(const std::vector<Complex>& new_roots);

  // Choose the branch whose value is closest in phase to target.
  void normalize(Complex target);

 private:
  std::vector<Factor> factors_;
  std::vector<double> args_;
  Complex log_prefactor_;
  double quantum_;
  Complex point_;
};

}  // namespace reslat
