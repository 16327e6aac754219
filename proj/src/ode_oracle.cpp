#include "reslat/ode_oracle.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "reslat/model.hpp"

namespace reslat {

namespace odeint = boost::numeric::odeint;

namespace {

using State4 = std::array<Complex, 4>;

double norm2(Complex a, Complex b) { return std::sqrt(std::norm(a) + std::norm(b)); }

// Adaptive loop over s ∈ [0, 1] with step-count and underflow guards.
template <class State, class System, class Observer>
std::size_t march_unit(System&& rhs, State& y, const OdeOptions& opt, Observer&& obs) {
  auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_fehlberg78<State>());
  double s = 0.0, ds = 1e-3;
  std::size_t steps = 0;
  while (s < 1.0) {
    ds = std::min(ds, 1.0 - s);
    if (stepper.try_step(rhs, y, s, ds) == odeint::success) {
      ++steps;
      obs(y, s);
      if (1.0 - s < 1e-15) break;
    } else if (ds < 1e-14) {
      fail(ErrorKind::step_underflow, "step size collapsed at s = " + std::to_string(s));
    }
    if (steps > opt.max_steps) fail(ErrorKind::step_underflow, "step budget exhausted");
  }
  return steps;
}

Complex phi0(Complex x, Complex E) { return x * x * x / 3.0 - E * x; }

// Integrates v = e^{−i(φ₀(x) − φ₀(x₀))/h}u (pair in slots 0–1 and 2–3) so that
// the f⁺ growth on rotated rays is divided out.
struct VMarch {
  std::vector<State4> at_vertices;
  double drift = 0.0;
  std::size_t steps = 0;
};

VMarch march_v(const WkbSystem& sys, const std::vector<Complex>& vertices, State4 y, bool pair,
               const OdeOptions& opt) {
  VMarch out;
  out.at_vertices.push_back(y);
  const Complex x0 = vertices.front();
  const Complex W0 = y[0] * y[3] - y[1] * y[2];
  const Complex i_h = kI / sys.h;
  double scale_u = 0.0, scale_v = 0.0;
  for (std::size_t j = 0; j + 1 < vertices.size(); ++j) {
    const Complex p = vertices[j], d = vertices[j + 1] - vertices[j];
    if (segment_distance(0.0, p, vertices[j + 1]) == 0.0) fail(ErrorKind::invalid_argument, "path hits x = 0");
    auto rhs = [&](const State4& v, State4& dv, double s) {
      const Complex x = p + s * d;
      const Complex c = sys.nu / x, g = -2.0 * (x * x - sys.E);
      const Complex f = i_h * d;
      dv[0] = f * (c * v[1]);
      dv[1] = f * (-c * v[0] + g * v[1]);
      dv[2] = f * (c * v[3]);
      dv[3] = f * (-c * v[2] + g * v[3]);
    };
    auto obs = [&](const State4& v, double s) {
      if (!pair) return;
      const Complex x = p + s * d;
      const Complex expected = W0 * std::exp(-2.0 * i_h * (phi0(x, sys.E) - phi0(x0, sys.E)));
      scale_u = std::max(scale_u, norm2(v[0], v[1]));
      scale_v = std::max(scale_v, norm2(v[2], v[3]));
      out.drift = std::max(out.drift, std::abs(v[0] * v[3] - v[1] * v[2] - expected) / (scale_u * scale_v));
    };
    out.steps += march_unit<State4>(rhs, y, opt, obs);
    out.at_vertices.push_back(y);
  }
  return out;
}

std::array<Complex, 3> sorted_turning_points(const ModelParams& p) {
  auto r = turning_points(p.E, p.nu).r;
  std::sort(r.begin(), r.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  return r;
}

}  // namespace

FrobeniusStart frobenius_init(const ModelParams& p, double eps, int K) {
  if (K < 8) fail(ErrorKind::invalid_argument, "series order K must be at least 8");
  const auto r = sorted_turning_points(p);
  if (!(eps > 0.0) || eps > 1e-2 * std::abs(r[0])) fail(ErrorKind::invalid_argument, "eps must be in (0, r0/100]");
  const double nt = p.nu_tilde;
  FrobeniusStart s;
  s.coeffs.assign(K + 1, Vec2{0.0, 0.0});
  s.coeffs[0] = {1.0, -kI};
  for (int n = 1; n <= K; ++n) {
    Vec2 rhs{0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
      const double sg = c == 0 ? 1.0 : -1.0;
      Complex v = -p.E * s.coeffs[n - 1][c];
      if (n >= 3) v += s.coeffs[n - 3][c];
      rhs[c] = sg * v / p.h;
    }
    // [−i(ν̃+n), −ν̃; ν̃, −i(ν̃+n)] aₙ = rhs
    const Complex d = -kI * (nt + n);
    const Complex det = d * d + nt * nt;
    s.coeffs[n] = {(d * rhs[0] + nt * rhs[1]) / det, (d * rhs[1] - nt * rhs[0]) / det};
  }
  Vec2 sum{0.0, 0.0};
  double pw = 1.0, last = 0.0;
  for (int n = 0; n <= K; ++n, pw *= eps) {
    sum[0] += s.coeffs[n][0] * pw;
    sum[1] += s.coeffs[n][1] * pw;
    last = norm2(s.coeffs[n][0], s.coeffs[n][1]) * pw;
  }
  s.truncation = last / norm2(sum[0], sum[1]);
  if (!(s.truncation < 1e-10)) fail(ErrorKind::series_divergence, "Frobenius terms do not decay at eps");
  const double lead = std::pow(eps, nt);
  s.u = {sum[0] * lead, sum[1] * lead};
  return s;
}

Vec2 frobenius_residual(const ModelParams& p, const FrobeniusStart& s, Complex x) {
  const double nt = p.nu_tilde;
  Vec2 u{0.0, 0.0}, du{0.0, 0.0};
  for (std::size_t n = 0; n < s.coeffs.size(); ++n) {
    const Complex xp = std::pow(x, nt + static_cast<double>(n));
    for (int c = 0; c < 2; ++c) {
      u[c] += s.coeffs[n][c] * xp;
      du[c] += s.coeffs[n][c] * (nt + static_cast<double>(n)) * xp / x;
    }
  }
  const Complex a = x * x - p.E, b = p.nu / x;
  return {-kI * p.h * du[0] - (a * u[0] + b * u[1]), -kI * p.h * du[1] - (-b * u[0] - a * u[1])};
}

IntegrationResult integrate_system(const WkbSystem& sys, const ComplexPath& path, const Vec2& u_start,
                                   std::optional<Vec2> partner, const OdeOptions& opt) {
  IntegrationResult res;
  res.path = path;
  if (path.vertices.empty()) fail(ErrorKind::invalid_argument, "empty path");
  const Vec2 w = partner.value_or(Vec2{0.0, 0.0});
  const VMarch m = march_v(sys, path.vertices, {u_start[0], u_start[1], w[0], w[1]}, partner.has_value(), opt);
  const Complex x0 = path.front();
  for (std::size_t j = 0; j < m.at_vertices.size(); ++j) {
    const Complex f = std::exp(kI * (phi0(path.vertices[j], sys.E) - phi0(x0, sys.E)) / sys.h);
    res.at_vertices.push_back({f * m.at_vertices[j][0], f * m.at_vertices[j][1]});
    if (j + 1 == m.at_vertices.size()) {
      res.u_end = res.at_vertices.back();
      if (partner) res.partner_end = Vec2{f * m.at_vertices[j][2], f * m.at_vertices[j][3]};
    }
  }
  res.wronskian_drift = m.drift;
  res.steps = m.steps;
  return res;
}

JostEstimate jost_cplus(const ModelParams& p, const JostOptions& opt) {
  if (!(opt.theta > 0.0 && opt.theta < kPi / 3)) fail(ErrorKind::invalid_argument, "theta must lie in (0, pi/3)");
  if (opt.plateau_samples < 2) fail(ErrorKind::invalid_argument, "need at least two plateau samples");
  const auto r = sorted_turning_points(p);
  const double x_mid = std::sqrt(r[1].real() * r[2].real());
  if (!(x_mid > 0.0)) fail(ErrorKind::invalid_argument, "turning points r1, r2 must have positive real part");
  const double s3 = std::sin(3.0 * opt.theta);
  double R = opt.R_max > 0.0 ? opt.R_max : std::cbrt(3.0 * p.h * opt.margin / s3);
  R = std::max(R, 2.0 * x_mid);
  if (s3 * std::pow(0.8 * R, 3) / (3.0 * p.h) < 10.0) fail(ErrorKind::no_plateau, "dominance margin below 10 at 0.8 R");
  const double eps = opt.eps > 0.0 ? opt.eps : 1e-3 * std::min(1.0, std::abs(r[0]));
  const FrobeniusStart fs = frobenius_init(p, eps, opt.K);

  const Complex rot = std::exp(Complex(0.0, -opt.theta));
  std::vector<Complex> v{eps, x_mid, x_mid * rot};
  const int first_sample = 3;
  for (int j = 0; j < opt.plateau_samples; ++j)
    v.push_back((0.8 + 0.2 * j / (opt.plateau_samples - 1)) * R * rot);

  const double lead = std::pow(eps, p.nu_tilde);
  const State4 y0{fs.u[0] / lead, fs.u[1] / lead, 1.0, kI};
  const VMarch m = march_v(WkbSystem::from(p), v, y0, true, opt.ode);

  // ∫_∞^x (λ − (s² − E)) ds with λ ≈ (s² − E) − ν²/(2s²(s² − E))
  const Complex rE = std::sqrt(p.E);
  auto delta = [&](Complex x) {
    const Complex L = std::log((x - rE) / (x + rE)) / (2.0 * rE);
    return -0.5 * p.nu * p.nu / p.E * (L + 1.0 / x);
  };
  const Complex base = std::exp(-kI * phi0(eps, p.E) / p.h) * lead;
  std::vector<Complex> est;
  for (std::size_t j = first_sample; j < v.size(); ++j)
    est.push_back(m.at_vertices[j][0] * base * std::exp(-kI * delta(v[j]) / p.h));

  JostEstimate out;
  out.c_plus = est.back();
  for (const Complex& e : est) out.plateau_error = std::max(out.plateau_error, std::abs(e - out.c_plus));
  out.plateau_error /= std::abs(out.c_plus);
  out.R_max = R;
  out.theta = opt.theta;
  out.wronskian_drift = m.drift;
  out.steps = m.steps;
  if (!(out.plateau_error <= opt.plateau_tol))
    fail(ErrorKind::no_plateau, "c+ varies by " + std::to_string(out.plateau_error) + " over the last fifth of the ray");
  return out;
}

namespace {

Complex cplus_at(const ModelParams& p, Complex E, const JostOptions& opt) {
  JostOptions o = opt;
  o.plateau_tol = 1e300;  // near a zero the relative plateau measure is meaningless
  return jost_cplus(p.with_energy(E), o).c_plus;
}

}  // namespace

int winding_number(const ModelParams& p, Complex center, double radius, int points, const JostOptions& opt,
                   double* median_abs) {
  std::vector<Complex> c(points);
  parallel_for(points, [&](std::size_t j) {
    c[j] = cplus_at(p, center + radius * std::exp(Complex(0.0, 2.0 * kPi * j / points)), opt);
  });
  double turn = 0.0;
  for (int j = 0; j < points; ++j) turn += std::arg(c[(j + 1) % points] / c[j]);
  if (median_abs) {
    std::vector<double> a;
    for (const Complex& z : c) a.push_back(std::abs(z));
    std::nth_element(a.begin(), a.begin() + a.size() / 2, a.end());
    *median_abs = a[a.size() / 2];
  }
  return static_cast<int>(std::lround(turn / (2.0 * kPi)));
}

OdeResonance find_resonance_ode(int k, double nu_tilde, double h, Complex E_seed, const FindOptions& opt) {
  const ModelParams p = ModelParams::make(E_seed, h, nu_tilde);
  OdeResonance out;
  out.record.k = k;
  out.record.nu_tilde = nu_tilde;
  out.record.method = "ode-oracle";
  out.record.lambda_lat = lattice_lambda(k, nu_tilde, h, LatticeVariant::stated);

  Complex E0 = E_seed, E1 = E_seed + 1e-3 * h;
  Complex c0 = cplus_at(p, E0, opt.jost), c1 = cplus_at(p, E1, opt.jost);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (c1 == c0) break;
    const Complex E2 = E1 - c1 * (E1 - E0) / (c1 - c0);
    E0 = E1;
    c0 = c1;
    E1 = E2;
    c1 = cplus_at(p, E1, opt.jost);
    if (std::abs(E1 - E0) < 1e-13 * std::abs(E1)) break;
  }
  if (it == opt.max_iter) fail(ErrorKind::no_convergence, "secant on c+ did not settle");

  const JostEstimate at = jost_cplus(p.with_energy(E1), [&] {
    JostOptions o = opt.jost;
    o.plateau_tol = 1e300;
    return o;
  }());
  out.record.E = E1;
  out.record.lambda = std::pow(E1, 1.5);
  out.record.iterations = it + 1;
  out.c_abs = std::abs(at.c_plus);
  out.wronskian_drift = at.wronskian_drift;
  out.ring_radius = opt.ring_radius > 0.0 ? opt.ring_radius : 0.05 * h;
  out.winding = winding_number(p, E1, out.ring_radius, opt.ring_points, opt.jost, &out.ring_median);
  out.record.residual = out.c_abs / out.ring_median;
  // plateau of the extraction, measured on the ring where c⁺ is not small
  out.plateau_error =
      jost_cplus(p.with_energy(E1 + out.ring_radius), [&] {
        JostOptions o = opt.jost;
        o.plateau_tol = 1e300;
        return o;
      }()).plateau_error;
  if (out.winding != 1) out.record.error = "spurious zero: winding number " + std::to_string(out.winding);
  else if (!(out.record.residual < 1e-8)) out.record.error = "c+ not below 1e-8 of the ring median";
  return out;
}

namespace {

using Real2 = std::array<double, 2>;

Real2 march_real(int l, double h, double E, double r0, double r1, Real2 y) {
  const double c = l * l - 0.25;
  // renormalize between chunks so the growing solution never overflows
  const int chunks = 8;
  for (int j = 0; j < chunks; ++j) {
    const double a = r0 + (r1 - r0) * j / chunks, d = (r1 - r0) / chunks;
    auto rhs = [&](const Real2& v, Real2& dv, double s) {
      const double r = a + s * d;
      dv[0] = d * v[1];
      dv[1] = d * (c / (r * r) + (r - E) / (h * h)) * v[0];
    };
    march_unit<Real2>(rhs, y, OdeOptions{1e-12, 1e-300, 2'000'000}, [](const Real2&, double) {});
    const double s = std::hypot(y[0], h * y[1]);
    y[0] /= s;
    y[1] /= s;
  }
  return y;
}

}  // namespace

double pplus_matching(int l, double h, double E) {
  if (l < 1) fail(ErrorKind::invalid_argument, "P+ oracle needs l >= 1");
  if (!(E > 0.0) || !(h > 0.0)) fail(ErrorKind::invalid_argument, "P+ oracle needs E > 0 and h > 0");
  const double c = l * l - 0.25;
  const double alpha1 = h * std::sqrt(c) / std::sqrt(E);
  const double r0 = 1e-2 * std::min(alpha1, 1.0);
  // u = r^{l+½} Σ bₙ rⁿ, n(n+2l) bₙ = (b_{n−3} − E b_{n−2})/h²
  std::vector<double> b(40, 0.0);
  b[0] = 1.0;
  double u = 1.0, du = (l + 0.5) / r0;
  for (int n = 2; n < 40; ++n) {
    b[n] = ((n >= 3 ? b[n - 3] : 0.0) - E * b[n - 2]) / (h * h * n * (n + 2 * l));
    u += b[n] * std::pow(r0, n);
    du += (n + l + 0.5) * b[n] * std::pow(r0, n - 1);
  }
  const double rm = 0.5 * E;
  const double R = E + std::pow(45.0 * h, 2.0 / 3.0);
  const Real2 out = march_real(l, h, E, r0, rm, {u, du});
  const double q = R - E;
  const Real2 in = march_real(l, h, E, R, rm, {1.0, -(std::sqrt(q) / h + 0.25 / q)});
  const double W = out[0] * in[1] - out[1] * in[0];
  return h * W / (std::hypot(out[0], h * out[1]) * std::hypot(in[0], h * in[1]));
}

std::vector<double> pplus_eigen_oracle(int l, double h, double a, double b) {
  if (!(a > 0.0 && b > a)) fail(ErrorKind::invalid_argument, "window needs 0 < a < b");
  const double step = std::min(0.05 * kPi * h / std::sqrt(b), (b - a) / 20.0);
  const int n = static_cast<int>(std::ceil((b - a) / step));
  std::vector<double> E(n + 1), F(n + 1);
  for (int j = 0; j <= n; ++j) {
    E[j] = a + (b - a) * j / n;
    F[j] = pplus_matching(l, h, E[j]);
  }
  std::vector<double> out;
  for (int j = 0; j < n; ++j) {
    if (F[j] == 0.0) {
      out.push_back(E[j]);
      continue;
    }
    if (F[j] * F[j + 1] >= 0.0) continue;
    std::uintmax_t iters = 100;
    const auto br = boost::math::tools::toms748_solve([&](double e) { return pplus_matching(l, h, e); }, E[j],
                                                      E[j + 1], F[j], F[j + 1],
                                                      boost::math::tools::eps_tolerance<double>(48), iters);
    if (iters >= 100) fail(ErrorKind::matching_failure, "bracket refinement did not converge");
    out.push_back(0.5 * (br.first + br.second));
  }
  if (out.empty()) fail(ErrorKind::window_empty, "no eigenvalue in the window");
  return out;
}

}  // namespace reslat
