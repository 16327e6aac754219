#pragma once

#include "reslat/contour.hpp"
#include "reslat/model.hpp"

namespace reslat {

struct ActionOptions {
  double tol = 1e-10;
  int max_evals = 400000;
  double proximity = -1.0;  // turning-point proximity; default from the model
};

// ∫_{r₀}^{r₁} √(ν² − r²(E − r²)²)/r dr; positive imaginary for real E > 0.
ActionValue action_S01(Complex E, double nu, const ActionOptions& opt = {});
ActionValue action_S01(const ModelParams& p, const ActionOptions& opt = {});
// ∂S₀₁/∂E = ∫_{r₀}^{r₁} −r(E − r²)/√(…) dr (the endpoint terms vanish).
ActionValue action_S01_dE(Complex E, double nu, const ActionOptions& opt = {});

// ∫_{y₀}^{y₁} √(y(1 − y)² − μ²)/(2y) dy.
ActionValue action_I(double mu, const ActionOptions& opt = {});
// ∫_{y₁}^{y₂} √(y²(1 − y) − μ²)/y dy.
ActionValue action_Iplus(double mu, const ActionOptions& opt = {});

// Two-term small-μ asymptote of I and I⁺ as printed, 2/3 + πμ/2, and the one
// the quadrature actually follows, 2/3 − πμ/2.
double stated_I_asymptote(double mu);
double derived_I_asymptote(double mu);

// Residue term as printed, −πμ.
Complex residue_R(double mu);
// i∫_{y₁}^{y₂} √(μ² − y(1 − y)²)/(2y) dy ≈ iπμ²/4.
ActionValue tunnel_T(double mu, const ActionOptions& opt = {});

struct MonodromyResult {
  ActionValue start;  // I(μ) on the dragged contour at φ = 0
  ActionValue end;    // I(e^{iπ}μ) after continuation
  Complex jump;       // end − start
  int steps = 0;
  ComplexPath head;   // y₀ → anchor at φ = π
  ComplexPath tail;   // anchor → y₁ at φ = π
};

// I(μe^{iφ}) continued in φ ∈ [0, π]: the contour is dragged by the moving
// roots and kept clear of the pole and the other branch points.
MonodromyResult monodromy_I(double mu, const ActionOptions& opt = {}, int steps = 720);

enum class S2Route { compactified, truncated };

// ∫_{r₂}^{∞} [√(…)/x − i(x² − E)] dx + (i/3)(r₂³ − 3Er₂).  The truncated route
// stops at x = R (default 8 + 4|r₂|) and adds the two-term tail.
ActionValue action_S2inf(Complex E, double nu, const ActionOptions& opt = {},
                         S2Route route = S2Route::compactified, double R = 0.0);
ActionValue action_S2inf(const ModelParams& p, const ActionOptions& opt = {});
// The truncated integral alone, without tail or boundary term.
ActionValue s2inf_truncated_integral(Complex E, double nu, double R, const ActionOptions& opt = {});

// ∫_{α₁}^{α₂} √(r − E + h²(l² − ¼)/r²) dr, purely imaginary with Im > 0.
ActionValue action_S12(double E, double h, int l, const ActionOptions& opt = {});

}  // namespace reslat
