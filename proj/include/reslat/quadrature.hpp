#pragma once

#include <functional>
#include <vector>

#include "reslat/core.hpp"

namespace reslat {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_evals = 400000;
};

struct QuadResult {
  Complex value;
  double error = 0.0;
  int evals = 0;
};

using RealToComplex = std::function<Complex(double)>;

// Globally adaptive 21-point Gauss–Kronrod on [a, b] for complex integrands.
// Throws quadrature_failure if the tolerance is not met within max_evals.
QuadResult integrate(const RealToComplex& f, double a, double b, const QuadOptions& opt = {});

// Gauss–Legendre panel on [-1, 1] with the spectral cumulative-integration
// matrix: S(k, j) = ∫_{-1}^{t_k} ℓ_j(t) dt.
class GaussPanel {
 public:
  explicit GaussPanel(int order);

  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double cumulative(int k, int j) const { return cum_[k * order() + j]; }
  // Row of the cumulative matrix for an arbitrary t in [-1, 1].
  std::vector<double> cumulative_row(double t) const;
  // Lagrange interpolation weights at t.
  std::vector<double> interpolation_row(double t) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> cum_;
};

}  // namespace reslat
