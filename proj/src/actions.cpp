#include "reslat/actions.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace reslat {

namespace {

QuadOptions quad_options(const ActionOptions& opt) {
  QuadOptions q;
  q.abs_tol = opt.tol;
  q.max_evals = opt.max_evals;
  return q;
}

ActionValue from_quad(const QuadResult& r, Complex scale = 1.0) {
  return {r.value * scale, r.error * std::abs(scale), r.evals};
}

// ∫_a^b √((r − a)(b − r))·√(±(r − c))/r dr for real a < b, with c outside
// [a, b]; cos substitution r = a + (b − a)(1 − cos θ)/2.
ActionValue real_bump(double a, double b, double c, const ActionOptions& opt) {
  const double half = 0.5 * (b - a);
  auto f = [=](double t) -> Complex {
    const double r = a + half * (1.0 - std::cos(t));
    const double s = half * std::sin(t);
    return s * s * std::sqrt(std::abs(r - c)) / r;
  };
  return from_quad(integrate(f, 0.0, kPi, quad_options(opt)));
}

std::array<double, 3> sorted_real_roots(Complex a2, Complex a1, Complex a0) {
  auto x = solve_monic_cubic(a2, a1, a0);
  std::array<double, 3> r{x[0].real(), x[1].real(), x[2].real()};
  std::sort(r.begin(), r.end());
  return r;
}

// Roots y₀ < 0 < y₁ < y₂ of y³ − y² + c (c > 0, three real roots).
std::array<double, 3> plus_roots(double E, double c) {
  if (!(27.0 * c < 4.0 * E * E * E)) {
    fail(ErrorKind::no_real_turning_points, "Langer cubic has a complex pair");
  }
  auto r = sorted_real_roots(-E, 0.0, c);
  // polish in real arithmetic on r²(r − E) + c
  for (auto& v : r) {
    for (int it = 0; it < 4; ++it) {
      const double f = v * v * (v - E) + c, df = v * (3.0 * v - 2.0 * E);
      if (df == 0.0) break;
      v -= f / df;
    }
  }
  return r;
}

struct S01Geometry {
  TurningPoints tp;
  double deflection = 0.0;
};

Complex s01_point(const S01Geometry& g, double s) {
  const Complex d = g.tp.r[1] - g.tp.r[0];
  return g.tp.r[0] + d * Complex(s, g.deflection * s * (1.0 - s));
}

// G(r) = i·√(r + r₀)·√(r + r₁)·√(x₂ − r²), each factor principal.
Complex s01_G(const TurningPoints& tp, Complex r) {
  return kI * std::sqrt(r + tp.r[0]) * std::sqrt(r + tp.r[1]) * std::sqrt(tp.x[2] - r * r);
}

S01Geometry s01_geometry(Complex E, double nu, const ActionOptions& opt) {
  S01Geometry g{turning_points(E, nu), 0.0};
  if (g.tp.degenerate) fail(ErrorKind::branch_ambiguity, "degenerate turning points");
  const double prox = opt.proximity > 0 ? opt.proximity : default_proximity(E);
  const std::array<Complex, 5> others{0.0, g.tp.r[2], -g.tp.r[0], -g.tp.r[1], -g.tp.r[2]};
  auto clearance = [&](double d) {
    g.deflection = d;
    // obstacles whose closest approach is an end point cannot be avoided by
    // bending the contour and are harmless for the integrand
    double m = 1e300;
    const Complex first = s01_point(g, 0.0), last = s01_point(g, 1.0);
    for (auto o : others) {
      double dmin = 1e300;
      Complex prev = first;
      for (int i = 1; i <= 64; ++i) {
        const Complex cur = s01_point(g, i / 64.0);
        dmin = std::min(dmin, segment_distance(o, prev, cur));
        prev = cur;
      }
      const double dend = std::min(std::abs(o - first), std::abs(o - last));
      if (dmin < dend * (1.0 - 1e-12)) m = std::min(m, dmin);
    }
    return m;
  };
  bool found = false;
  for (double d : {0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0}) {
    if (clearance(d) > 10.0 * prox) {
      found = true;
      break;
    }
  }
  if (!found) fail(ErrorKind::turning_point_proximity, "no clear contour between r0 and r1");
  // the principal factors of G must stay on one sheet along the contour
  Complex prev = s01_G(g.tp, s01_point(g, 1e-9));
  for (int i = 1; i <= 256; ++i) {
    const Complex cur = s01_G(g.tp, s01_point(g, i / 256.0 - (i == 256 ? 1e-9 : 0.0)));
    if (std::abs(std::arg(cur / prev)) > kPi / 2) {
      fail(ErrorKind::branch_ambiguity, "square root crosses a cut between r0 and r1");
    }
    prev = cur;
  }
  return g;
}

// The θ-integrand pieces of the deflected contour r(s), s = (1 − cos θ)/2:
// √((r − r₀)(r₁ − r)) = (Δ/2) sin θ·ω(s), dr = (Δ/2) sin θ·(1 + id(1 − 2s)) dθ.
struct S01Sample {
  Complex r;
  Complex root_factor;  // (Δ/2) sin θ·ω(s)
  Complex jacobian;     // dr/dθ
};

S01Sample s01_sample(const S01Geometry& g, double t) {
  const Complex d = g.tp.r[1] - g.tp.r[0];
  const double s = 0.5 * (1.0 - std::cos(t));
  const double dd = g.deflection;
  const Complex omega = std::sqrt(Complex(1.0, dd * (1.0 - s)) * Complex(1.0, -dd * s));
  const Complex base = 0.5 * d * std::sin(t);
  return {s01_point(g, s), base * omega, base * Complex(1.0, dd * (1.0 - 2.0 * s))};
}

}  // namespace

ActionValue action_S01(Complex E, double nu, const ActionOptions& opt) {
  const S01Geometry g = s01_geometry(E, nu, opt);
  auto f = [&](double t) {
    const S01Sample s = s01_sample(g, t);
    return s.root_factor * s.jacobian * s01_G(g.tp, s.r) / s.r;
  };
  return from_quad(integrate(f, 0.0, kPi, quad_options(opt)));
}

ActionValue action_S01(const ModelParams& p, const ActionOptions& opt) { return action_S01(p.E, p.nu, opt); }

ActionValue action_S01_dE(Complex E, double nu, const ActionOptions& opt) {
  const S01Geometry g = s01_geometry(E, nu, opt);
  auto f = [&](double t) {
    const S01Sample s = s01_sample(g, t);
    return -s.r * (E - s.r * s.r) * s.jacobian / (s.root_factor * s01_G(g.tp, s.r));
  };
  return from_quad(integrate(f, 0.0, kPi, quad_options(opt)));
}

ActionValue action_I(double mu, const ActionOptions& opt) {
  if (mu < 0.0) fail(ErrorKind::invalid_argument, "I(mu) needs mu >= 0");
  if (!(27.0 * mu * mu < 4.0)) fail(ErrorKind::no_real_turning_points, "mu beyond the real-root regime");
  const auto x = cubic_roots(1.0, mu).x;
  ActionValue v = real_bump(x[0].real(), x[1].real(), x[2].real(), opt);
  v.value *= 0.5;
  v.est_error *= 0.5;
  return v;
}

ActionValue action_Iplus(double mu, const ActionOptions& opt) {
  if (mu < 0.0) fail(ErrorKind::invalid_argument, "I+(mu) needs mu >= 0");
  const auto y = plus_roots(1.0, mu * mu);
  return real_bump(y[1], y[2], y[0], opt);
}

double stated_I_asymptote(double mu) { return 2.0 / 3.0 + 0.5 * kPi * mu; }
double derived_I_asymptote(double mu) { return 2.0 / 3.0 - 0.5 * kPi * mu; }

Complex residue_R(double mu) { return -kPi * mu; }

ActionValue tunnel_T(double mu, const ActionOptions& opt) {
  if (!(mu > 0.0)) fail(ErrorKind::invalid_argument, "T(mu) needs mu > 0");
  if (!(27.0 * mu * mu < 4.0)) fail(ErrorKind::no_real_turning_points, "mu beyond the real-root regime");
  const auto x = cubic_roots(1.0, mu).x;
  ActionValue v = real_bump(x[1].real(), x[2].real(), x[0].real(), opt);
  v.value *= 0.5 * kI;
  v.est_error *= 0.5;
  return v;
}

namespace {

int winding(const std::vector<Complex>& loop, Complex o) {
  double s = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    s += std::arg((loop[(k + 1) % loop.size()] - o) / (loop[k] - o));
  }
  return static_cast<int>(std::lround(s / (2.0 * kPi)));
}

bool same_point(Complex a, Complex b) { return std::abs(a - b) <= 1e-14 * (1.0 + std::abs(a)); }

// Greedy shortcutting that never changes the homotopy class in the plane
// punctured at the obstacles and keeps shortcuts at least delta away.
std::vector<Complex> simplify(const std::vector<Complex>& v, std::span<const Complex> obstacles, double delta) {
  auto valid = [&](std::size_t i, std::size_t j) {
    for (Complex o : obstacles) {
      bool at_vertex = false;
      for (std::size_t k = i; k <= j; ++k) at_vertex = at_vertex || same_point(v[k], o);
      if (at_vertex) continue;
      if (segment_distance(o, v[i], v[j]) < delta) return false;
      std::vector<Complex> loop(v.begin() + static_cast<std::ptrdiff_t>(i),
                                v.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      if (winding(loop, o) != 0) return false;
    }
    return true;
  };
  std::vector<Complex> out{v.front()};
  std::size_t i = 0;
  while (i + 1 < v.size()) {
    std::size_t j = i + 1;
    while (j + 1 < v.size() && valid(i, j + 1)) ++j;
    out.push_back(v[j]);
    i = j;
  }
  return out;
}

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_cross(Complex p1, Complex p2, Complex q1, Complex q2) {
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

bool motion_crosses(Complex from, Complex to, const std::vector<Complex>& poly) {
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    if (same_point(poly[k], from) || same_point(poly[k + 1], from)) continue;
    if (segments_cross(from, to, poly[k], poly[k + 1])) return true;
  }
  return false;
}

std::array<Complex, 3> match_to(const std::array<Complex, 3>& prev, std::array<Complex, 3> next) {
  std::array<int, 3> perm{0, 1, 2}, best{0, 1, 2};
  double best_cost = 1e300;
  do {
    double c = 0.0;
    for (int i = 0; i < 3; ++i) c += std::abs(prev[i] - next[perm[i]]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {next[best[0]], next[best[1]], next[best[2]]};
}

ActionValue dragged_integral(const BranchTracker& at_anchor, const std::vector<Complex>& head,
                             const std::vector<Complex>& tail, double min_distance, const ActionOptions& opt) {
  const TrackedIntegrand f = [](Complex y, Complex F) { return F / (2.0 * y); };
  TrackedOptions to;
  to.tol = 0.5 * opt.tol;
  to.max_evals = opt.max_evals;
  to.min_distance = min_distance;
  std::vector<Complex> back(head.rbegin() + 1, head.rend());
  to.end_root = 0;
  const ActionValue h = integrate_tracked(at_anchor, back, f, to);
  std::vector<Complex> fwd(tail.begin() + 1, tail.end());
  to.end_root = 1;
  const ActionValue t = integrate_tracked(at_anchor, fwd, f, to);
  return {t.value - h.value, t.est_error + h.est_error, t.n_evals + h.n_evals};
}

}  // namespace

MonodromyResult monodromy_I(double mu, const ActionOptions& opt, int steps) {
  if (!(mu > 0.0) || !(27.0 * mu * mu < 4.0)) fail(ErrorKind::invalid_argument, "monodromy needs 0 < mu < 2/sqrt(27)");
  if (steps < 16) fail(ErrorKind::invalid_argument, "too few continuation steps");
  const Complex anchor = 0.5;
  std::array<Complex, 3> y = cubic_roots(1.0, mu).x;
  auto separation = [](const std::array<Complex, 3>& r) {
    const std::array<Complex, 4> pts{0.0, r[0], r[1], r[2]};
    double m = 1e300;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) m = std::min(m, std::abs(pts[i] - pts[j]));
    return m;
  };
  BranchTracker tr({{y[0], 0.5}, {y[1], 0.5}, {y[2], 0.5}}, 0.0, kPi, anchor);
  tr.normalize(1.0);
  std::vector<Complex> head{y[0], anchor}, tail{anchor, y[1]};

  MonodromyResult out;
  const double min_d0 = 1e-3 * separation(y);
  out.start = dragged_integral(tr, head, tail, min_d0, opt);

  for (int k = 1; k <= steps; ++k) {
    const double phi = kPi * k / steps;
    const Complex c = -mu * mu * std::polar(1.0, 2.0 * phi);
    const auto next = match_to(y, solve_monic_cubic(-2.0, 1.0, c));
    for (int j = 0; j < 3; ++j) {
      if (motion_crosses(y[j], next[j], head) || motion_crosses(y[j], next[j], tail)) {
        fail(ErrorKind::continuation_failure, "a branch point crossed the contour; use more steps");
      }
    }
    tr.move_roots({next[0], next[1], next[2]});
    head.insert(head.begin(), next[0]);
    tail.push_back(next[1]);
    y = next;
    const std::array<Complex, 4> obstacles{0.0, y[0], y[1], y[2]};
    const double delta = 0.25 * separation(y);
    head = simplify(head, obstacles, delta);
    tail = simplify(tail, obstacles, delta);
  }
  out.end = dragged_integral(tr, head, tail, 1e-3 * separation(y), opt);
  out.jump = out.end.value - out.start.value;
  out.steps = steps;
  out.head = ComplexPath(head);
  out.tail = ComplexPath(tail);
  return out;
}

namespace {

// √(x²(x² − E)² − ν²) as a product of principal roots; positive for real
// x > r₂ and real E.
struct S2Factors {
  Complex E;
  TurningPoints tp;
};

Complex s2_integrand_compact(const S2Factors& g, double nu, double t) {
  // σ = 1 − (1 − t)², x = r₂/σ
  const double w = 1.0 - t;
  const double sigma = 1.0 - w * w;
  if (sigma < 1e-60) return 0.0;
  const Complex r2 = g.tp.r[2], x2 = g.tp.x[2];
  const Complex x = r2 / sigma;
  const double inv2 = 1.0 / (sigma * sigma);
  const Complex S = std::sqrt(x2 * inv2 - g.tp.x[0]) * std::sqrt(x2 * inv2 - g.tp.x[1]) * std::sqrt(x2) * w *
                    std::sqrt(1.0 + sigma) / sigma;
  const Complex integrand = -kI * nu * nu / (x * (S + x * (x * x - g.E)));
  return integrand * r2 * inv2 * (2.0 * w);
}

Complex s2_boundary(const S2Factors& g) {
  const Complex r2 = g.tp.r[2];
  return kI / 3.0 * (r2 * r2 * r2 - 3.0 * g.E * r2);
}

Complex s2_tail(Complex E, double nu, double R) {
  return -0.5 * kI * nu * nu * (1.0 / (3.0 * R * R * R) + E / (5.0 * std::pow(R, 5)));
}

S2Factors s2_factors(Complex E, double nu) {
  S2Factors g{E, turning_points(E, nu)};
  if (nu == 0.0) return g;
  if (g.tp.degenerate) fail(ErrorKind::branch_ambiguity, "degenerate turning points");
  return g;
}

}  // namespace

ActionValue s2inf_truncated_integral(Complex E, double nu, double R, const ActionOptions& opt) {
  const S2Factors g = s2_factors(E, nu);
  const Complex r2 = g.tp.r[2];
  if (!(R > std::abs(r2))) fail(ErrorKind::invalid_argument, "truncation radius inside r2");
  if (nu == 0.0) return {0.0, 0.0, 0};
  const Complex d = R - r2;
  auto f = [&](double t) -> Complex {
    const Complex dx = d * t * t;
    const Complex x = r2 + dx;
    const Complex S = std::sqrt(x * x - g.tp.x[0]) * std::sqrt(x * x - g.tp.x[1]) * std::sqrt(dx * (x + r2));
    return -kI * nu * nu / (x * (S + x * (x * x - E))) * d * (2.0 * t);
  };
  return from_quad(integrate(f, 0.0, 1.0, quad_options(opt)));
}

ActionValue action_S2inf(Complex E, double nu, const ActionOptions& opt, S2Route route, double R) {
  const S2Factors g = s2_factors(E, nu);
  if (nu == 0.0) return {s2_boundary(g), 0.0, 0};
  ActionValue v;
  if (route == S2Route::compactified) {
    auto f = [&](double t) { return s2_integrand_compact(g, nu, t); };
    v = from_quad(integrate(f, 0.0, 1.0, quad_options(opt)));
  } else {
    if (R <= 0.0) R = 8.0 + 4.0 * std::abs(g.tp.r[2]);
    v = s2inf_truncated_integral(E, nu, R, opt);
    v.value += s2_tail(E, nu, R);
    v.est_error += std::abs(nu * nu * E * E) / std::pow(R, 7);
  }
  v.value += s2_boundary(g);
  return v;
}

ActionValue action_S2inf(const ModelParams& p, const ActionOptions& opt) { return action_S2inf(p.E, p.nu, opt); }

ActionValue action_S12(double E, double h, int l, const ActionOptions& opt) {
  if (l < 1) fail(ErrorKind::invalid_argument, "S12 needs l >= 1");
  if (!(E > 0.0) || !(h > 0.0)) fail(ErrorKind::invalid_argument, "S12 needs E > 0 and h > 0");
  const double c = h * h * (l * l - 0.25);
  const auto a = plus_roots(E, c);
  ActionValue v = real_bump(a[1], a[2], a[0], opt);
  v.value *= kI;
  return v;
}

}  // namespace reslat
