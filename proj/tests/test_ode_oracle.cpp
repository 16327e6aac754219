#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "reslat/ode_oracle.hpp"

using namespace reslat;

namespace {

int mid_band_k(double h, double nt) {
  return static_cast<int>(std::lround((2.5 / (3 * kPi / 16 * h) - 4 * nt - 5) / 8));
}

// Lowest eigenvalues of −u″ + ((l² − ¼)/r² + r)u on (0, L) by second-order
// differences, with h = 1.
std::vector<double> pplus_fd(int l, int n, double L) {
  const double d = L / (n + 1);
  Eigen::VectorXd diag(n), off = Eigen::VectorXd::Constant(n - 1, -1.0 / (d * d));
  for (int i = 0; i < n; ++i) {
    const double r = (i + 1) * d;
    diag(i) = 2.0 / (d * d) + (l * l - 0.25) / (r * r) + r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + 4};
}

}  // namespace

TEST_CASE("Frobenius start") {
  const ModelParams p = ModelParams::make(2.0, 0.1, 0.5);
  const FrobeniusStart s = frobenius_init(p, 1e-4, 20);
  CHECK(s.coeffs[0][0] == Complex(1.0));
  CHECK(s.coeffs[0][1] == -kI);
  CHECK(std::abs(s.u[0] / std::pow(1e-4, 0.5) - 1.0) < 1e-3);
  CHECK(std::abs(s.u[1] / std::pow(1e-4, 0.5) + kI) < 1e-3);
  for (Complex x : {Complex(1e-4), Complex(1e-3, 1e-3), Complex(0.05)}) {
    const Vec2 r = frobenius_residual(p, s, x);
    const double scale = std::pow(std::abs(x), 0.5);
    CHECK(std::hypot(std::abs(r[0]), std::abs(r[1])) < 1e-10 * scale);
  }
  for (double nt : {0.5, 1.5, 5.5}) {
    const ModelParams q = ModelParams::make({1.5, -0.05}, 0.05, nt);
    const FrobeniusStart f = frobenius_init(q, 1e-5, 24);
    CHECK(f.truncation < 1e-12);
    CHECK(std::abs(f.u[0] / std::pow(1e-5, nt) - 1.0) < 1e-3);
  }
  CHECK_THROWS_AS(frobenius_init(p, 1e-4, 4), NumericError);
  CHECK_THROWS_AS(frobenius_init(p, 0.1, 20), NumericError);
}

TEST_CASE("integrate_system") {
  const WkbSystem sys{2.0, 0.05, 0.1};
  const Vec2 u{1.0, 2.0 * kI};
  const IntegrationResult zero = integrate_system(sys, ComplexPath{Complex(0.5)}, u);
  CHECK(zero.u_end == u);
  CHECK(zero.steps == 0u);

  // ν = 0, E = 0: diagonal e^{±ix³/3h}
  const WkbSystem free{0.0, 0.0, 0.1};
  const ComplexPath path{Complex(0.3), Complex(1.4), Complex(1.4, -0.5)};
  const IntegrationResult r = integrate_system(free, path, {1.0, 1.0});
  const Complex x0 = 0.3, x1 = Complex(1.4, -0.5);
  const Complex ph = kI * (x1 * x1 * x1 - x0 * x0 * x0) / (3.0 * 0.1);
  const double big = std::max(std::abs(std::exp(ph)), std::abs(std::exp(-ph)));
  CHECK(std::abs(r.u_end[0] - std::exp(ph)) < 1e-8 * big);
  CHECK(std::abs(r.u_end[1] - std::exp(-ph)) < 1e-8 * big);
  CHECK(r.at_vertices.size() == 3);

  // trace-free: the pair's Wronskian is constant
  const ComplexPath ray{Complex(0.2), Complex(1.5), Complex(1.5) * std::exp(Complex(0, -0.5)),
                        Complex(2.5) * std::exp(Complex(0, -0.5))};
  const IntegrationResult w = integrate_system(sys, ray, {1.0, -kI}, Vec2{1.0, kI});
  CHECK(w.wronskian_drift < 1e-8);
  CHECK_THROWS_AS(integrate_system(sys, ComplexPath{Complex(-0.5), Complex(0.5)}, u), NumericError);
}

TEST_CASE("Jost coefficient") {
  for (double h : {0.2, 0.1, 0.05}) {
    const double nt = 0.5;
    const ResonanceRecord bs = solve_resonance(mid_band_k(h, nt), nt, h);
    const ModelParams p = ModelParams::make(bs.E + 0.3 * h, h, nt);
    JostOptions o;
    o.ode.rel_tol = 1e-13;
    const JostEstimate a = jost_cplus(p, o);
    CHECK(a.plateau_error < 1e-6);
    CHECK(a.wronskian_drift < 1e-8);
    o.theta = 0.4;
    const JostEstimate b = jost_cplus(p, o);
    o.theta = 0.6;
    const JostEstimate c = jost_cplus(p, o);
    CHECK(std::abs(b.c_plus - a.c_plus) < 1e-5 * std::abs(a.c_plus));
    CHECK(std::abs(c.c_plus - a.c_plus) < 1e-5 * std::abs(a.c_plus));
  }
  // |c⁺| dips at the BS root
  const double h = 0.1;
  const ResonanceRecord bs = solve_resonance(mid_band_k(h, 0.5), 0.5, h);
  const double at = std::abs(jost_cplus(ModelParams::make(bs.E, h, 0.5), {.plateau_tol = 1e300}).c_plus);
  double med = 0.0;
  CHECK(winding_number(ModelParams::make(bs.E, h, 0.5), bs.E, 0.5 * h, 16, {}, &med) == 1);
  CHECK(at < 1e-2 * med);

  JostOptions bad;
  bad.theta = 1.2;
  CHECK_THROWS_AS(jost_cplus(ModelParams::make(2.0, 0.1, 0.5), bad), NumericError);
  JostOptions short_ray;
  short_ray.margin = 20.0;
  try {
    jost_cplus(ModelParams::make(2.0, 0.1, 0.5), short_ray);
    FAIL("expected no_plateau");
  } catch (const NumericError& e) {
    CHECK(e.kind() == ErrorKind::no_plateau);
  }
}

TEST_CASE("ODE resonances against BS") {
  double prev = 1.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const int k = mid_band_k(h, 0.5);
    const ResonanceRecord bs = solve_resonance(k, 0.5, h);
    const OdeResonance r = find_resonance_ode(k, 0.5, h, bs.E);
    CHECK(r.record.error.empty());
    CHECK(r.winding == 1);
    CHECK(r.record.residual < 1e-8);
    CHECK(r.record.lambda.imag() < 0.0);
    CHECK(r.wronskian_drift < 1e-8);
    const double gap = std::abs(r.record.lambda - bs.lambda) / h;
    MESSAGE("h " << h << " |lambda_ode - lambda_bs|/h " << gap);
    CHECK(gap < prev);
    prev = gap;
  }
  // a ring far from any zero winds zero times
  double med = 0.0;
  const ModelParams p = ModelParams::make(2.0, 0.1, 0.5);
  const ResonanceRecord bs = solve_resonance(mid_band_k(0.1, 0.5), 0.5, 0.1);
  CHECK(winding_number(p, bs.E + 0.15, 0.01, 16, {}, &med) == 0);
  CHECK(med > 0.0);
}

TEST_CASE("P+ shooting oracle") {
  // exact scaling E ∝ h^{2/3}; difference eigenvalues of the scaled problem
  for (int l : {1, 2}) {
    const auto fd = pplus_fd(l, 6000, 18.0);
    for (double h : {0.02, 0.01}) {
      const auto ev = pplus_eigen_oracle(l, h, 1e-3, 0.5);
      REQUIRE(ev.size() >= 2);
      for (int i = 0; i < 2; ++i) CHECK(ev[i] / std::pow(h, 2.0 / 3.0) == doctest::Approx(fd[i]).epsilon(1e-5));
    }
  }
  // eigenvalues approach (3π/4)(2n + 1 + l)h
  const auto ev = pplus_eigen_oracle(1, 0.01, 1e-3, 0.5);
  for (std::size_t n = 1; n < ev.size(); ++n) {
    const double x = std::pow(ev[n], 1.5) / (0.75 * kPi * 0.01);
    CHECK(std::abs(x - (2.0 * n + 2.0)) < std::abs(std::pow(ev[n - 1], 1.5) / (0.75 * kPi * 0.01) - (2.0 * n)));
  }
  // the k = 0, l = 1 prediction has no eigenvalue near it
  const double E0 = pplus_levels(0.01, 1, 0)[0];
  CHECK(ev.front() > 5.0 * E0);
  CHECK_THROWS_AS(pplus_eigen_oracle(1, 0.01, 0.05, 0.06), NumericError);
  CHECK_THROWS_AS(pplus_eigen_oracle(0, 0.01, 0.05, 0.5), NumericError);
}
