#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "doctest.h"
#include "reslat/model.hpp"

using namespace reslat;

namespace {

// Independent root finder: eigenvalues of the companion matrix.
std::array<Complex, 3> companion_roots(Complex E, double nu) {
  Eigen::Matrix3cd C = Eigen::Matrix3cd::Zero();
  C(1, 0) = 1.0;
  C(2, 1) = 1.0;
  C(0, 2) = nu * nu;
  C(1, 2) = -E * E;
  C(2, 2) = 2.0 * E;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(C);
  std::array<Complex, 3> r{es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};
  return r;
}

double match_error(std::array<Complex, 3> a, std::array<Complex, 3> b) {
  std::array<int, 3> perm{0, 1, 2};
  double best = 1e300;
  do {
    double e = 0.0;
    for (int i = 0; i < 3; ++i) e = std::max(e, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, e);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Complex cubic(Complex x, Complex E, double nu) { return x * x * x - 2.0 * E * x * x + E * E * x - nu * nu; }

}  // namespace

TEST_CASE("discriminant closed form") {
  CHECK(discriminant(2.0, 0.0) == Complex(0.0));
  CHECK(std::abs(discriminant(2.0, 0.5) - 6.3125) < 1e-14);
  CHECK(std::abs(discriminant(1.0, 1.0) + 23.0) < 1e-14);
}

TEST_CASE("cubic roots against the companion oracle") {
  auto c = cubic_roots(2.0, 0.0);
  CHECK(c.degenerate);
  CHECK(std::abs(c.x[0]) < 1e-14);
  CHECK(std::abs(c.x[1] - 2.0) < 1e-12);
  CHECK(std::abs(c.x[2] - 2.0) < 1e-12);

  c = cubic_roots(2.0, 0.5);
  CHECK_FALSE(c.degenerate);
  CHECK(match_error(c.x, companion_roots(2.0, 0.5)) < 1e-12);
  CHECK(std::abs(c.x[0].real() - 0.0669) < 5e-4);
  CHECK(std::abs(c.x[1].real() - 1.606) < 1e-3);
  CHECK(std::abs(c.x[2].real() - 2.327) < 1e-3);

  c = cubic_roots(1.0, 0.01);
  const double nu2 = 1e-4;
  CHECK(std::abs(c.x[0].real() - nu2) < 3.0 * nu2 * nu2 * 10);
}

TEST_CASE("turning points ordering and values") {
  auto tp = turning_points(2.0, 0.5);
  CHECK(std::abs(tp.r[0].real() - 0.2587) < 5e-4);
  CHECK(std::abs(tp.r[1].real() - 1.267) < 5e-4);
  CHECK(std::abs(tp.r[2].real() - 1.526) < 5e-4);
  CHECK(tp.r[1].real() < std::sqrt(2.0));
  CHECK(std::sqrt(2.0) < tp.r[2].real());
  CHECK(tp.g_sign[0] == +1);
  CHECK(tp.g_sign[1] == +1);
  CHECK(tp.g_sign[2] == -1);

  tp = turning_points(2.0, 0.0);
  CHECK(tp.degenerate);
  CHECK(std::abs(tp.r[1] - std::sqrt(2.0)) < 1e-12);

  const Complex E(1.0, 0.05);
  tp = turning_points(E, 0.05);
  for (int j = 0; j < 3; ++j) {
    CHECK(tp.r[j].real() > 0.0);
    CHECK(std::abs(cubic(tp.x[j], E, 0.05)) < 1e-12);
  }
  CHECK(match_error(tp.x, companion_roots(E, 0.05)) < 1e-12);
  // continuation keeps x₀ small and x₁, x₂ near E
  CHECK(std::abs(tp.x[0]) < 0.01);
  CHECK(std::abs(tp.x[1] - E) < 0.2);
  CHECK(std::abs(tp.x[2] - E) < 0.2);
}

TEST_CASE("random roots satisfy residual and Vieta bounds") {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> mod(0.5, 4.0), ang(-kPi / 2, kPi / 2), nud(0.0, 1.0);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const Complex E = std::polar(mod(rng), ang(rng));
    const double nu = nud(rng);
    const auto c = cubic_roots(E, nu);
    const double scale = std::max(1.0, std::pow(std::abs(E), 3));
    for (auto x : c.x)
      if (std::abs(cubic(x, E, nu)) > 1e-12 * scale) ++bad;
    if (std::abs(c.x[0] + c.x[1] + c.x[2] - 2.0 * E) > 1e-12 * std::max(1.0, std::abs(E))) ++bad;
    if (std::abs(c.x[0] * c.x[1] * c.x[2] - nu * nu) > 1e-12 * scale) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("discriminant sign decides reality of the roots") {
  for (double E = 0.25; E <= 4.0; E += 0.25) {
    for (double nu = 0.05; nu <= 2.0; nu += 0.05) {
      const auto c = cubic_roots(E, nu);
      const auto o = companion_roots(E, nu);
      bool all_real = true;
      for (auto x : o) all_real = all_real && std::abs(x.imag()) < 1e-7;
      if (std::abs(c.D3.real()) < 1e-6) continue;
      CHECK((c.D3.real() > 0) == all_real);
    }
  }
}

TEST_CASE("small nu limit law") {
  double prev1 = 1e300, prev2 = 1e300;
  for (double nu = 1e-1; nu >= 1e-6; nu /= 10) {
    const auto tp = turning_points(1.0, nu);
    CHECK(std::abs(tp.r[0].real() / nu - 1.0) < 2.0 * nu);
    const double d1 = std::abs(tp.r[1] - 1.0), d2 = std::abs(tp.r[2] - 1.0);
    CHECK(d1 < prev1);
    CHECK(d2 < prev2);
    prev1 = d1;
    prev2 = d2;
  }
}

TEST_CASE("energy surface") {
  const auto tp = turning_points(2.0, 0.5);
  CHECK(std::abs(energy_surface_rho2(2.0, 0.5, tp.r[1].real())) < 1e-10);
  CHECK(std::abs(energy_surface_rho2(2.0, 0.5, 1.0) - 0.75) < 1e-14);
  CHECK_THROWS_AS(energy_surface_rho2(2.0, 0.5, 0.0), NumericError);

  // ν = 1/4: one bounded and one unbounded allowed component
  int components = 0;
  bool inside = false, last_inside = false;
  for (int i = 1; i <= 40000; ++i) {
    const double r = i * 1e-4;
    inside = energy_surface_rho2(2.0, 0.25, r) >= 0.0;
    if (inside && !last_inside) ++components;
    last_inside = inside;
  }
  CHECK(components == 2);
  CHECK(inside);
}

TEST_CASE("symbol branch conventions") {
  const auto p = ModelParams::make(1.0, 0.1, 0.5);
  auto br = SymbolBranch::at_origin(p);
  const auto& tp = br.turning();
  const double r0 = tp.r[0].real(), r1 = tp.r[1].real(), r2 = tp.r[2].real();
  const double d = 0.5 * r0;

  auto v = symbol_at(1e-8, p, br);
  CHECK(std::abs(v.H - 1.0) < 1e-6);

  br.advance_along({Complex(r0 / 2, 0.0), Complex(r0, -d)});
  const double xm = 0.5 * (r0 + r1);
  v = symbol_at(xm, p, br);
  CHECK(std::abs(std::arg(v.H) + kPi / 4) < 1e-12);
  CHECK(std::abs(v.g_plus * v.g_minus * xm * xm - (p.nu * p.nu - xm * xm * std::pow(1.0 - xm * xm, 2))) < 1e-12);
  CHECK(std::abs(std::pow(v.H, 4) - v.g_minus / v.g_plus) < 1e-12);
  CHECK(std::abs(v.sqrt_gg * v.sqrt_gg - v.g_plus * v.g_minus) < 1e-12);
  CHECK(v.sqrt_gg.imag() > 0.0);
  CHECK(std::abs(v.sqrt_gg.real()) < 1e-12);

  br.advance_along({Complex(r1, d), Complex(0.5 * (r1 + r2), 0.0), Complex(r2, -d)});
  v = symbol_at(r2 + 1.0, p, br);
  CHECK(std::abs(std::arg(v.H) - kPi / 4) < 1e-12);

  auto inf = SymbolBranch::at_infinity(p);
  auto w = symbol_at(r2 + 1.0, p, inf);
  CHECK(std::abs(w.H - v.H) < 1e-12);
  CHECK(std::abs(w.sqrt_gg - v.sqrt_gg) < 1e-12);
}

TEST_CASE("fourth-root monodromy around a turning point") {
  const auto p = ModelParams::make(1.0, 0.1, 0.5);
  auto br = SymbolBranch::at_origin(p);
  const Complex r1 = br.turning().r[1];
  const double rad = 0.01;
  br.advance_along({Complex(0.05, 0.0), Complex(0.05, -0.1), r1 - 0.1 * kI, r1 - rad});
  const Complex before = symbol_at(r1 - rad, p, br).H;
  Complex prev = before;
  double max_jump = 0.0;
  for (int k = 1; k <= 256; ++k) {
    const Complex x = r1 - rad * std::polar(1.0, 2.0 * kPi * k / 256);
    const Complex h = symbol_at(x, p, br).H;
    max_jump = std::max(max_jump, std::abs(h - prev));
    prev = h;
  }
  const Complex factor = prev / before;
  CHECK(std::abs(std::abs(factor) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(factor - 1.0)) > 0.5);
  CHECK(std::min(std::abs(factor - kI), std::abs(factor + kI)) < 1e-12);
  CHECK(max_jump < 0.1 * std::abs(before));
}

TEST_CASE("proximity is reported") {
  const auto p = ModelParams::make(1.0, 0.1, 0.5);
  auto br = SymbolBranch::at_origin(p);
  CHECK_THROWS_AS(symbol_at(0.0, p, br), NumericError);
  const Complex r0 = br.turning().r[0];
  try {
    br.advance_to(r0);
    FAIL("expected proximity error");
  } catch (const NumericError& e) {
    CHECK(e.kind() == ErrorKind::turning_point_proximity);
  }
}

TEST_CASE("log derivative of H matches finite differences") {
  const auto p = ModelParams::make(1.0, 0.1, 0.5);
  auto br = SymbolBranch::at_infinity(p);
  const Complex x(1.7, 0.2);
  br.advance_to(x);
  const double eps = 1e-6;
  auto b1 = br, b2 = br;
  b1.advance_to(x + eps);
  b2.advance_to(x - eps);
  const Complex fd = (b1.H() - b2.H()) / (2 * eps) / br.H();
  CHECK(std::abs(fd - log_derivative_H(x, p.E, p.nu)) < 1e-7);
}
