#pragma once

#include <array>
#include <span>
#include <vector>

#include "reslat/actions.hpp"
#include "reslat/model.hpp"

namespace reslat {

using Vec2 = std::array<Complex, 2>;

Complex wronskian(const Vec2& u, const Vec2& v);

// (E, ν, h) with ν free; the model ties ν = ν̃h, amplitude studies do not.
struct WkbSystem {
  Complex E;
  double nu = 0.0;
  double h = 0.0;

  static WkbSystem from(const ModelParams& p) { return {p.E, p.nu, p.h}; }
};

struct PhaseValue {
  Complex z;
  Complex base_point;
  ComplexPath path;
  double est_error = 0.0;
};

// z(x; x₀) = ∫ √(g₊g₋) along route, starting from the branch's current point.
PhaseValue phase_z(const SymbolBranch& at_base, std::span<const Complex> route, const ActionOptions& opt = {});

// z(x; r) for a turning point r = route.back(); the branch is given at x.
PhaseValue phase_from_turning_point(const SymbolBranch& at_x, std::span<const Complex> route_to_tp,
                                    const ActionOptions& opt = {});

struct AmplitudePair {
  Complex w_even = 1.0;
  Complex w_odd = 0.0;
  int N = 0;
  Complex base_point;
  double remainder = 0.0;  // modulus of the last computed term
};

struct AmplitudeOptions {
  int panel_order = 16;
  double panel_phase = 2.0;    // bound on |2Δz/h| per panel
  int monotone_samples = 64;   // per segment
  double monotone_tol = 1e-12;
};

struct AmplitudeProfile {
  std::vector<Complex> x;  // panel end points, base first
  std::vector<Complex> z;
  std::vector<Complex> w_even;
  std::vector<Complex> w_odd;
  std::vector<Complex> terms;  // w_n at the end point, n = 0..N
  AmplitudePair end;
  Complex z_end;  // z(end; base)
  Complex H_end;  // H at the end point on the tracked branch
};

// Amplitudes w_{n,±}, n ≤ N, from the base point (the branch's current point)
// along route; sign = ±1.  Throws monotonicity_violation unless sign·Re z
// increases along every segment.
AmplitudeProfile amplitude_recurrence(const WkbSystem& sys, const SymbolBranch& at_base,
                                      std::span<const Complex> route, int sign, int N,
                                      const AmplitudeOptions& opt = {});

// e^{±z/h} T_±(H) (w_even, w_odd)ᵀ.
Vec2 wkb_solution(int sign, Complex z, Complex H, Complex w_even, Complex w_odd, double h);

struct OriginSeries {
  AmplitudePair pair;
  std::vector<Complex> terms;  // w⁰_n(iρ), n = 0..N
};

// w⁰_{n,+} at x = iρ with the amplitude base point at the origin.
OriginSeries origin_series(const WkbSystem& sys, double rho, int N, bool require_convergence = true);

// K(τ)ⁿ/n!·(τ/(1 + τ))ⁿ with K(τ) = 1 + 3ν²τ²/E³.
double origin_bound(double E, double nu, double tau, int n);

struct ConnectionC0 {
  Complex c0_plus = 1.0;
  Complex c0_minus{0.0, -1.0};
  // |w⁰_even − 1| at x = i√E/2; tends to a ν̃-dependent constant, not to 0
  double o1_estimate = 0.0;
};

ConnectionC0 connection_c0(const ModelParams& p);

}  // namespace reslat
