#include "reslat/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reslat {

namespace {

Complex cubic_value(Complex x, Complex a2, Complex a1, Complex a0) { return ((x + a2) * x + a1) * x + a0; }

Complex polish(Complex x, Complex a2, Complex a1, Complex a0) {
  Complex f = cubic_value(x, a2, a1, a0);
  for (int it = 0; it < 8 && f != 0.0; ++it) {
    const Complex df = (3.0 * x + 2.0 * a2) * x + a1;
    if (df == 0.0) break;
    const Complex next = x - f / df;
    const Complex fn = cubic_value(next, a2, a1, a0);
    if (!(std::abs(fn) < std::abs(f))) break;
    x = next;
    f = fn;
  }
  return x;
}

// The model cubic in the factored form x(x − E)² − ν², which keeps relative
// accuracy near the clustered pair x ≈ E.
Complex model_value(Complex x, Complex E, double nu) { return x * (x - E) * (x - E) - nu * nu; }

Complex polish_model(Complex x, Complex E, double nu) {
  Complex f = model_value(x, E, nu);
  for (int it = 0; it < 8 && f != 0.0; ++it) {
    const Complex df = (x - E) * (3.0 * x - E);
    if (df == 0.0) break;
    const Complex next = x - f / df;
    const Complex fn = model_value(next, E, nu);
    if (!(std::abs(fn) < std::abs(f))) break;
    x = next;
    f = fn;
  }
  return x;
}

double polish_model_real(double x, double E, double nu) {
  double f = x * (x - E) * (x - E) - nu * nu;
  for (int it = 0; it < 8 && f != 0.0; ++it) {
    const double df = (x - E) * (3.0 * x - E);
    if (df == 0.0) break;
    const double next = x - f / df;
    const double fn = next * (next - E) * (next - E) - nu * nu;
    if (!(std::abs(fn) < std::abs(f))) break;
    x = next;
    f = fn;
  }
  return x;
}

std::array<Complex, 3> model_roots_unordered(Complex E, double nu) {
  auto x = solve_monic_cubic(-2.0 * E, E * E, Complex(-nu * nu));
  for (auto& v : x) v = polish_model(v, E, nu);
  return x;
}

void sort_by_modulus(std::array<Complex, 3>& x) {
  std::sort(x.begin(), x.end(), [](Complex a, Complex b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a.imag() < b.imag();
  });
}

double min_pair_distance(const std::array<Complex, 3>& x) {
  return std::min({std::abs(x[0] - x[1]), std::abs(x[0] - x[2]), std::abs(x[1] - x[2])});
}

// Match `next` to `prev` by the permutation of least total displacement.
std::optional<std::array<Complex, 3>> match_roots(const std::array<Complex, 3>& prev,
                                                  const std::array<Complex, 3>& next) {
  std::array<int, 3> perm{0, 1, 2}, best{};
  double best_cost = 1e300, max_disp = 0.0;
  do {
    double cost = 0.0, disp = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = std::abs(prev[i] - next[perm[i]]);
      cost += d;
      disp = std::max(disp, d);
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
      max_disp = disp;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (max_disp > 0.25 * min_pair_distance(prev)) return std::nullopt;
  return std::array<Complex, 3>{next[best[0]], next[best[1]], next[best[2]]};
}

std::array<Complex, 3> real_energy_roots(double E, double nu, Complex D3) {
  const double a2 = -2.0 * E, a1 = E * E, a0 = -nu * nu;
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  std::array<Complex, 3> x;
  if (D3.real() > 0.0 && p < 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double c = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double phi = std::acos(c) / 3.0;
    std::array<double, 3> t;
    for (int k = 0; k < 3; ++k) t[k] = m * std::cos(phi - 2.0 * kPi * k / 3.0) - a2 / 3.0;
    std::sort(t.begin(), t.end());
    for (int k = 0; k < 3; ++k) x[k] = polish_model_real(t[k], E, nu);
    // the smallest root is best recovered from Vieta
    if (x[1].real() != 0.0 && x[2].real() != 0.0) {
      x[0] = polish_model_real(nu * nu / (x[1].real() * x[2].real()), E, nu);
    }
    return x;
  }
  if (nu == 0.0) {
    std::array<double, 3> t{0.0, E, E};
    std::sort(t.begin(), t.end());
    return {Complex(t[0]), Complex(t[1]), Complex(t[2])};
  }
  x = model_roots_unordered(Complex(E), nu);
  if (D3.real() >= 0.0) {
    for (auto& v : x) v = Complex(v.real(), 0.0);
    std::sort(x.begin(), x.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    return x;
  }
  // one real root, one conjugate pair
  std::sort(x.begin(), x.end(), [](Complex a, Complex b) { return std::abs(a.imag()) < std::abs(b.imag()); });
  Complex real_root(polish_model_real(x[0].real(), E, nu), 0.0);
  Complex pair = x[1].imag() < 0.0 ? x[1] : x[2];
  return {real_root, pair, std::conj(pair)};
}

}  // namespace

Complex discriminant(Complex E, double nu) { return nu * nu * (4.0 * E * E * E - 27.0 * nu * nu); }

std::array<Complex, 3> solve_monic_cubic(Complex a2, Complex a1, Complex a0) {
  const Complex shift = a2 / 3.0;
  const Complex p = a1 - a2 * a2 / 3.0;
  const Complex q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const Complex s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  const Complex A1 = -q / 2.0 + s, A2 = -q / 2.0 - s;
  const Complex A = std::abs(A1) >= std::abs(A2) ? A1 : A2;
  std::array<Complex, 3> t{};
  if (A == 0.0) {
    t = {0.0, 0.0, 0.0};
  } else {
    const Complex S = std::exp(std::log(A) / 3.0);
    const Complex T = -p / (3.0 * S);
    const Complex w = std::polar(1.0, 2.0 * kPi / 3.0);
    t = {S + T, w * S + std::conj(w) * T, std::conj(w) * S + w * T};
  }
  std::array<Complex, 3> x;
  for (int k = 0; k < 3; ++k) x[k] = polish(t[k] - shift, a2, a1, a0);
  return x;
}

CubicRoots cubic_roots(Complex E, double nu) {
  CubicRoots out;
  out.D3 = discriminant(E, nu);
  const double scale = std::max(1.0, std::pow(std::abs(E), 6));
  out.degenerate = std::abs(out.D3) <= 1e-20 * scale;
  if (E.imag() == 0.0) {
    out.x = real_energy_roots(E.real(), nu, out.D3);
    return out;
  }
  const double Er = E.real();
  if (!out.degenerate && Er > 0.0 && nu * nu < 4.0 * Er * Er * Er / 27.0) {
    auto prev = real_energy_roots(Er, nu, discriminant(Complex(Er), nu));
    double s = 0.0, ds = 1.0 / 16.0;
    bool ok = true;
    while (s < 1.0 && ok) {
      const double s_next = std::min(1.0, s + ds);
      const Complex Es(Er, s_next * E.imag());
      auto matched = match_roots(prev, model_roots_unordered(Es, nu));
      if (matched) {
        prev = *matched;
        s = s_next;
        ds = std::min(2.0 * ds, 1.0 / 16.0);
      } else if (ds > 1e-6) {
        ds *= 0.5;
      } else {
        ok = false;
      }
    }
    if (ok) {
      out.x = prev;
      return out;
    }
  }
  out.x = model_roots_unordered(E, nu);
  sort_by_modulus(out.x);
  return out;
}

double TurningPoints::min_separation() const {
  double d = 1e300;
  std::array<Complex, 7> pts{r[0], r[1], r[2], -r[0], -r[1], -r[2], 0.0};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::min(d, std::abs(pts[i] - pts[j]));
  return d;
}

TurningPoints turning_points(Complex E, double nu) {
  const CubicRoots c = cubic_roots(E, nu);
  TurningPoints tp;
  tp.x = c.x;
  tp.D3 = c.D3;
  tp.degenerate = c.degenerate;
  for (int j = 0; j < 3; ++j) {
    tp.r[j] = std::sqrt(c.x[j]);
    const Complex v = tp.r[j] * (c.x[j] - E);
    tp.g_sign[j] = std::abs(v + nu) <= std::abs(v - nu) ? +1 : -1;
  }
  return tp;
}

double energy_surface_rho2(double E, double nu, double r) {
  if (!(r > 0.0)) fail(ErrorKind::invalid_argument, "energy surface needs r > 0");
  return (E - r * r) * (E - r * r) - nu * nu / (r * r);
}

double default_proximity(Complex E) { return 1e-6 * std::abs(std::sqrt(E)); }

SymbolBranch::SymbolBranch(Complex E, double nu, TurningPoints tp, BranchTracker root, BranchTracker quartic,
                           double proximity)
    : E_(E), nu_(nu), tp_(tp), root_(std::move(root)), quartic_(std::move(quartic)), proximity_(proximity) {}

namespace {

std::vector<BranchTracker::Factor> root_factors(const TurningPoints& tp) {
  std::vector<BranchTracker::Factor> f;
  for (int j = 0; j < 3; ++j) f.push_back({tp.r[j], 0.5});
  for (int j = 0; j < 3; ++j) f.push_back({-tp.r[j], 0.5});
  return f;
}

std::vector<BranchTracker::Factor> quartic_factors(const TurningPoints& tp) {
  std::vector<BranchTracker::Factor> f;
  for (int j = 0; j < 3; ++j) f.push_back({tp.r[j], tp.g_sign[j] > 0 ? -0.25 : 0.25});
  for (int j = 0; j < 3; ++j) f.push_back({-tp.r[j], tp.g_sign[j] > 0 ? 0.25 : -0.25});
  return f;
}

}  // namespace

SymbolBranch SymbolBranch::at_origin(Complex E, double nu, double proximity) {
  if (!(nu > 0.0)) fail(ErrorKind::invalid_argument, "origin normalization needs nu > 0");
  const TurningPoints tp = turning_points(E, nu);
  if (tp.degenerate) fail(ErrorKind::branch_ambiguity, "degenerate turning points");
  BranchTracker root(root_factors(tp), kI * (kPi / 2), kPi, 0.0);
  BranchTracker quartic(quartic_factors(tp), kI * (kPi / 4), kPi / 2, 0.0);
  root.normalize(Complex(nu));
  quartic.normalize(1.0);
  return SymbolBranch(E, nu, tp, std::move(root), std::move(quartic),
                      proximity > 0 ? proximity : default_proximity(E));
}

SymbolBranch SymbolBranch::at_infinity(Complex E, double nu, double proximity) {
  if (!(nu > 0.0)) fail(ErrorKind::invalid_argument, "branch tracking needs nu > 0");
  const TurningPoints tp = turning_points(E, nu);
  if (tp.degenerate) fail(ErrorKind::branch_ambiguity, "degenerate turning points");
  double rmax = 0.0;
  for (auto r : tp.r) rmax = std::max(rmax, std::abs(r));
  const double X = 4.0 * rmax + 4.0;
  BranchTracker root(root_factors(tp), kI * (kPi / 2), kPi, X);
  BranchTracker quartic(quartic_factors(tp), kI * (kPi / 4), kPi / 2, X);
  root.normalize(kI * X * (X * X - E));
  quartic.normalize(std::polar(1.0, kPi / 4));
  return SymbolBranch(E, nu, tp, std::move(root), std::move(quartic),
                      proximity > 0 ? proximity : default_proximity(E));
}

void SymbolBranch::advance_to(Complex x, int exempt) {
  // factor order is identical in both trackers
  root_.advance_to(x, proximity_, exempt);
  quartic_.advance_to(x, proximity_, exempt);
}

void SymbolBranch::advance_along(const std::vector<Complex>& route) {
  for (Complex x : route) advance_to(x);
}

int SymbolBranch::root_index_at(Complex x, double tol) const {
  const auto& f = root_.factors();
  for (std::size_t k = 0; k < f.size(); ++k)
    if (std::abs(f[k].root - x) <= tol) return static_cast<int>(k);
  return -1;
}

SymbolValue symbol_at(Complex x, const ModelParams& p, SymbolBranch& state) {
  if (x == 0.0) fail(ErrorKind::turning_point_proximity, "symbol evaluated at the origin");
  state.advance_to(x);
  SymbolValue v;
  v.g_plus = (p.nu - p.E * x + x * x * x) / x;
  v.g_minus = (p.nu + p.E * x - x * x * x) / x;
  const double prox = state.proximity();
  if (std::abs(v.g_plus * v.g_minus) < prox * prox) {
    fail(ErrorKind::turning_point_proximity, "evaluation point is a turning point");
  }
  v.sqrt_gg = state.sqrt_gg();
  v.H = state.H();
  v.branch_phase = state.h_phase();
  return v;
}

Complex log_derivative_H(Complex x, Complex E, double nu) {
  const Complex w = E - x * x;
  return 0.5 * nu * (E - 3.0 * x * x) / (nu * nu - x * x * w * w);
}

}  // namespace reslat
