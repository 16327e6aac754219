#pragma once

#include <array>
#include <optional>

#include "reslat/core.hpp"
#include "reslat/path.hpp"

namespace reslat {

Complex discriminant(Complex E, double nu);

// Roots of x³ + a2 x² + a1 x + a0, Newton-polished, in no particular order.
std::array<Complex, 3> solve_monic_cubic(Complex a2, Complex a1, Complex a0);

struct CubicRoots {
  std::array<Complex, 3> x;
  Complex D3;
  bool degenerate = false;
};

// Roots of x³ − 2Ex² + E²x − ν² with x₀ → 0 and x₁, x₂ → E as ν → 0.
CubicRoots cubic_roots(Complex E, double nu);

struct TurningPoints {
  std::array<Complex, 3> x;
  std::array<Complex, 3> r;
  Complex D3;
  bool degenerate = false;
  // +1 when r_j is a zero of g₊ (r(r² − E) = −ν), −1 for a zero of g₋.
  std::array<int, 3> g_sign{};

  double min_separation() const;
};

TurningPoints turning_points(Complex E, double nu);

double energy_surface_rho2(double E, double nu, double r);

double default_proximity(Complex E);

struct SymbolValue {
  Complex g_plus;
  Complex g_minus;
  Complex H;
  Complex sqrt_gg;  // √(g₊g₋) on the tracked branch
  double branch_phase = 0.0;  // arg H on the tracked branch (not reduced mod 2π)
};

// Branch state for √(ν² − x²(E − x²)²) and H = ((ν+Ex−x³)/(ν−Ex+x³))^{1/4}.
class SymbolBranch {
 public:
  // Normalized at x = 0: √(…) = ν, H = 1.
  static SymbolBranch at_origin(Complex E, double nu, double proximity = -1.0);
  static SymbolBranch at_origin(const ModelParams& p, double proximity = -1.0) {
    return at_origin(p.E, p.nu, proximity);
  }
  // Normalized at a large real x: √(…) ≈ i x (x² − E), H ≈ e^{iπ/4}.
  static SymbolBranch at_infinity(Complex E, double nu, double proximity = -1.0);
  static SymbolBranch at_infinity(const ModelParams& p, double proximity = -1.0) {
    return at_infinity(p.E, p.nu, proximity);
  }

  const TurningPoints& turning() const { return tp_; }
  Complex E() const { return E_; }
  double nu() const { return nu_; }
  const BranchTracker& root_tracker() const { return root_; }
  Complex point() const { return root_.point(); }
  double proximity() const { return proximity_; }

  void advance_to(Complex x, int exempt = -1);
  void advance_along(const std::vector<Complex>& route);

  // √(ν² − x²(E − x²)²) at the current point.
  Complex sqrt_numerator() const { return root_.value(); }
  Complex sqrt_gg() const { return root_.value() / point(); }
  Complex H() const { return quartic_.value(); }
  double h_phase() const { return quartic_.log_value().imag(); }

  // Index of the factor of the square-root tracker that sits at x, or -1.
  int root_index_at(Complex x, double tol) const;

 private:
  SymbolBranch(Complex E, double nu, TurningPoints tp, BranchTracker root, BranchTracker quartic, double proximity);

  Complex E_;
  double nu_;
  TurningPoints tp_;
  BranchTracker root_;
  BranchTracker quartic_;
  double proximity_;
};

// Advances the branch state to x and evaluates.  Throws
// turning_point_proximity when |g₊g₋| is below proximity².
SymbolValue symbol_at(Complex x, const ModelParams& p, SymbolBranch& state);

// H′/H with respect to x; single valued.
Complex log_derivative_H(Complex x, Complex E, double nu);

}  // namespace reslat
