#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reslat/actions.hpp"
#include "reslat/parallel.hpp"

namespace reslat {

struct ResonanceRecord {
  int k = 0;
  double nu_tilde = 0.5;
  Complex lambda_lat;  // lattice prediction for λ = E^{3/2}
  Complex lambda;      // refined
  Complex E;
  std::string method;  // lattice, bs-newton, ode-oracle
  double residual = 0.0;
  int iterations = 0;
  std::string error;  // empty on success
};

struct Band {
  double a = 1.0;
  double b = 4.0;

  void validate() const;
};

// A(E) = log(√(πh/2)ν̃E^{−3/4}) − iπ/4 + 2S₀₁(E)/h; resonances solve A = iπ(2k+1).
struct BsValue {
  Complex A;
  Complex dA;  // ∂A/∂E
  double est_error = 0.0;
};

BsValue bs_condition(Complex E, double h, double nu_tilde, const ActionOptions& opt = {});
Complex bs_residual(Complex E, double h, double nu_tilde, int k, const ActionOptions& opt = {});
// Branch k whose target iπ(2k+1) is closest to A.
int nearest_branch(Complex A);

// The printed lattice uses 8k − 4ν̃ + 5; the residual's roots follow
// 8k + 4ν̃ + 5 (the sign of the πμ/2 term in the action).
enum class LatticeVariant { stated, sign_corrected };

std::string_view to_string(LatticeVariant v);

// (3π/16)(8k ∓ 4ν̃ + 5)h − (3i/8)(h ln(1/h) − h ln(πν̃²/(2 Re λ))).
Complex lattice_lambda(int k, double nu_tilde, double h, LatticeVariant v = LatticeVariant::stated);

// Every k with a < Re λ < b; throws empty_band otherwise.
std::vector<ResonanceRecord> lattice(double nu_tilde, double h, const Band& band,
                                     LatticeVariant v = LatticeVariant::stated);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
  ActionOptions action{1e-12, 2000000, -1.0};
  LatticeVariant seed_lattice = LatticeVariant::sign_corrected;
};

// Newton on A(E) − iπ(2k+1).  Throws no_convergence or non_simple_root.
ResonanceRecord solve_resonance(int k, double nu_tilde, double h, std::optional<Complex> seed_E = std::nullopt,
                                const SolveOptions& opt = {});

// Lattice points of every ν̃ ∈ {1/2, …, nu_tilde_max} in the band, refined by
// Newton.  Per-root failures are recorded in ResonanceRecord::error.  Runs on
// up to `threads` workers (0: RES_LAT_THREADS or the hardware count); the
// output order does not depend on the thread count.
std::vector<ResonanceRecord> resonance_set(const Band& band, double h, double nu_tilde_max,
                                           const SolveOptions& opt = {},
                                           LatticeVariant lattice_variant = LatticeVariant::stated,
                                           unsigned threads = 0);


// E = [(3π/4)(2k + 1 − √(l² − ¼))h]^{2/3} for k = 0..kmax with a positive bracket.
std::vector<double> pplus_levels(double h, int l, int kmax);
// |e^{2S₁₂(E,h)/h} + 1|.
double pplus_residual(double E, double h, int l, const ActionOptions& opt = {});

}  // namespace reslat
