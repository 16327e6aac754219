#pragma once

#include <optional>
#include <vector>

#include "reslat/path.hpp"
#include "reslat/quantization.hpp"
#include "reslat/wkb.hpp"

namespace reslat {

struct FrobeniusStart {
  Vec2 u;                     // x^ν̃ Σ aₙxⁿ at eps, a₀ = (1, −i)
  std::vector<Vec2> coeffs;   // a₀ … a_K
  double truncation = 0.0;    // |a_K eps^K| / |Σ|
};

FrobeniusStart frobenius_init(const ModelParams& p, double eps, int K = 20);
// hD_x u − Au at x from the series, for residual checks.
Vec2 frobenius_residual(const ModelParams& p, const FrobeniusStart& s, Complex x);

struct OdeOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  std::size_t max_steps = 2'000'000;
};

struct IntegrationResult {
  Vec2 u_end;
  std::optional<Vec2> partner_end;
  // max over accepted steps of |W(u,v)(x) − W(u,v)(x₀)| relative to the largest
  // |u||v| seen so far, with u, v measured against e^{iφ₀/h}; 0 without a partner
  double wronskian_drift = 0.0;
  std::size_t steps = 0;
  ComplexPath path;
  std::vector<Vec2> at_vertices;  // u at every path vertex
};

// Integrates (h/i)u' = Au along a piecewise-linear path avoiding 0.
IntegrationResult integrate_system(const WkbSystem& sys, const ComplexPath& path, const Vec2& u_start,
                                   std::optional<Vec2> partner = std::nullopt, const OdeOptions& opt = {});

struct JostOptions {
  double theta = 0.5;
  double R_max = 0.0;  // 0: sin(3θ)R³/3h = margin
  double margin = 1000.0;
  double eps = 0.0;    // 0: 10⁻³·min(1, r₀)
  int K = 20;
  int plateau_samples = 5;  // over [0.8 R_max, R_max]
  double plateau_tol = 1e-6;
  OdeOptions ode{};
};

struct JostEstimate {
  Complex c_plus;
  double plateau_error = 0.0;  // relative
  double R_max = 0.0;
  double theta = 0.0;
  double wronskian_drift = 0.0;
  std::size_t steps = 0;
};

// c⁺ in u₀ = c⁺f⁺ + c⁻f⁻ with f⁺ ~ e^{i(x³−3Ex)/3h}(1, 0).  Throws no_plateau.
JostEstimate jost_cplus(const ModelParams& p, const JostOptions& opt = {});

struct OdeResonance {
  ResonanceRecord record;
  int winding = 0;
  double ring_radius = 0.0;
  double ring_median = 0.0;  // median |c⁺| on the ring
  double c_abs = 0.0;        // |c⁺| at the root
  double wronskian_drift = 0.0;
  double plateau_error = 0.0;
};

struct FindOptions {
  JostOptions jost{};
  int max_iter = 40;
  double ring_radius = 0.0;  // 0: 0.05h
  int ring_points = 32;
};

// Secant on E ↦ c⁺(E) from the seed.  Winding number ≠ 1 or a residual above
// 10⁻⁸·ring median is reported in record.error, not thrown.
OdeResonance find_resonance_ode(int k, double nu_tilde, double h, Complex E_seed, const FindOptions& opt = {});

int winding_number(const ModelParams& p, Complex center, double radius, int points, const JostOptions& opt,
                   double* median_abs = nullptr);

// Radial eigenvalues of −h²(u″ + (¼ − l²)u/r²) + (r − E)u = 0 in (a, b).
std::vector<double> pplus_eigen_oracle(int l, double h, double a, double b);
// Normalized matching Wronskian; its zeros are the eigenvalues.
double pplus_matching(int l, double h, double E);

}  // namespace reslat
