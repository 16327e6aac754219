#include "reslat/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <queue>

namespace reslat {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

// Gauss weight for each Kronrod abscissa (zero where the node is Kronrod only).
const std::vector<double>& embedded_gauss_weights() {
  static const std::vector<double> w = [] {
    const auto& xk = Kronrod::abscissa();
    const auto& xg = Gauss::abscissa();
    std::vector<double> out(xk.size(), 0.0);
    for (std::size_t i = 0; i < xk.size(); ++i)
      for (std::size_t j = 0; j < xg.size(); ++j)
        if (std::abs(xk[i] - xg[j]) < 1e-12) out[i] = Gauss::weights()[j];
    return out;
  }();
  return w;
}

struct Panel {
  double a, b;
  Complex value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gk21(const RealToComplex& f, double a, double b) {
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = embedded_gauss_weights();
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const Complex f0 = f(c);
  Complex kronrod = wk[0] * f0;
  Complex gauss = wg[0] * f0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const Complex fl = f(c - r * x[i]);
    const Complex fr = f(c + r * x[i]);
    kronrod += wk[i] * (fl + fr);
    gauss += wg[i] * (fl + fr);
  }
  return {a, b, kronrod * r, std::abs((kronrod - gauss) * r)};
}

}  // namespace

QuadResult integrate(const RealToComplex& f, double a, double b, const QuadOptions& opt) {
  if (a == b) return {};
  constexpr int kEvalsPerPanel = 21;
  std::priority_queue<Panel> heap;
  Panel first = gk21(f, a, b);
  Complex total = first.value;
  double err = first.error;
  int evals = kEvalsPerPanel;
  heap.push(first);
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (err > target()) {
    if (evals + 2 * kEvalsPerPanel > opt.max_evals) {
      fail(ErrorKind::quadrature_failure,
           "error estimate " + std::to_string(err) + " above tolerance after " +
               std::to_string(evals) + " evaluations");
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      fail(ErrorKind::quadrature_failure, "panel collapsed below machine resolution");
    }
    Panel left = gk21(f, worst.a, mid);
    Panel right = gk21(f, mid, worst.b);
    evals += 2 * kEvalsPerPanel;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  Complex sum = 0.0;
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum, evals};
}

GaussPanel::GaussPanel(int order) {
  const int n = order;
  nodes_.resize(n);
  weights_.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const double p = boost::math::legendre_p(n, t);
      const double dp = boost::math::legendre_p_prime(n, t);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    const double dp = boost::math::legendre_p_prime(n, t);
    nodes_[n - 1 - i] = t;
    weights_[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  cum_.resize(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    const auto row = cumulative_row(nodes_[k]);
    std::copy(row.begin(), row.end(), cum_.begin() + static_cast<std::ptrdiff_t>(k) * n);
  }
}

// ℓ_j = Σ_m c_{mj} P_m with c_{mj} = (2m+1)/2 · w_j P_m(t_j), and
// ∫_{-1}^t P_m = (P_{m+1} − P_{m−1})/(2m+1), ∫_{-1}^t P_0 = t + 1.
std::vector<double> GaussPanel::cumulative_row(double t) const {
  const int n = order();
  std::vector<double> integral(n);
  integral[0] = t + 1.0;
  for (int m = 1; m < n; ++m) {
    integral[m] = (boost::math::legendre_p(m + 1, t) - boost::math::legendre_p(m - 1, t)) / (2.0 * m + 1.0);
  }
  std::vector<double> row(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int m = 0; m < n; ++m) {
      s += 0.5 * (2.0 * m + 1.0) * weights_[j] * boost::math::legendre_p(m, nodes_[j]) * integral[m];
    }
    row[j] = s;
  }
  return row;
}

std::vector<double> GaussPanel::interpolation_row(double t) const {
  const int n = order();
  std::vector<double> row(n, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int m = 0; m < n; ++m) {
      if (m != j) row[j] *= (t - nodes_[m]) / (nodes_[j] - nodes_[m]);
    }
  }
  return row;
}

}  // namespace reslat
