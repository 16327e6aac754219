#pragma once

#include <vector>

#include "reslat/series.hpp"

namespace reslat {

// φ(x) = (x − √E)((2/3)(x − √E) + 2√E)^{1/2}, principal root; Re x > 0.
Complex phi_map(Complex x, Complex E);
Complex phi_prime(Complex x, Complex E);
// ψ(y) = ((2/3)(x − √E) + 2√E)^{1/2}/(x(x + √E)) with x = φ⁻¹(y).
Complex psi_map(Complex y, Complex E);
// φ⁻¹ by Newton from the linearization at √E.
Complex phi_inverse(Complex y, Complex E);

// Taylor coefficients of ψ at y = 0, length n.
series::Series psi_series(Complex E, std::size_t n);

struct NormalFormCoeffs {
  double E = 0.0;
  double nu_tilde = 0.0;
  std::vector<Complex> gamma;   // γ₁ … γ_N
  std::vector<series::Series> q;  // q₀ … q_N at y = 0
  std::vector<series::Series> m;  // m₀ … m_N at y = 0
  std::size_t budget = 0;

  // Σ γₙhⁿ truncated at N.
  Complex gamma_at(double h) const;
};

// Throws order_too_high when a table would drop below one coefficient.
// budget = 0 selects 2N + 4.
NormalFormCoeffs gamma_series(double E, double nu_tilde, int N, std::size_t budget = 0);

// Σ_k |c_k| ρᵏ, a bound for the sup of the series on |y| ≤ ρ.
double sup_proxy(const series::Series& a, double rho);

struct GevreyFit {
  double D = 0.0;
  double C = 0.0;
  double t = 0.0;
  double worst_ratio = 0.0;  // max over n of proxyₙ / (D Cⁿ (2n)^{2n}/t^{2n})
};

// Least-squares fit of log proxyₙ ≈ log D + n log C + 2n log(2n) − 2n log t
// for n = 1..N; D is then raised so the bound holds at every n.
GevreyFit gevrey_fit(const std::vector<double>& proxies, double t);

}  // namespace reslat
