#include "reslat/normal_form.hpp"

#include <cmath>

namespace reslat {

namespace {

Complex inner(Complex x, Complex E) { return (2.0 / 3.0) * (x - std::sqrt(E)) + 2.0 * std::sqrt(E); }

series::Series constant(std::size_t n, Complex c) {
  series::Series s(n, 0.0);
  if (n > 0) s[0] = c;
  return s;
}

void check_principal(Complex x, Complex E) {
  if (!(x.real() > 0.0) || !(inner(x, E).real() > 0.0)) {
    fail(ErrorKind::branch_ambiguity, "point outside the principal neighbourhood of sqrt(E)");
  }
}

}  // namespace

Complex phi_map(Complex x, Complex E) {
  check_principal(x, E);
  return (x - std::sqrt(E)) * std::sqrt(inner(x, E));
}

Complex phi_prime(Complex x, Complex E) {
  check_principal(x, E);
  const Complex w = std::sqrt(inner(x, E));
  return w + (x - std::sqrt(E)) / (3.0 * w);
}

Complex phi_inverse(Complex y, Complex E) {
  const Complex rE = std::sqrt(E);
  Complex x = rE + y / std::sqrt(2.0 * rE);
  for (int it = 0; it < 60; ++it) {
    check_principal(x, E);
    const Complex dx = (phi_map(x, E) - y) / phi_prime(x, E);
    x -= dx;
    if (std::abs(dx) <= 1e-15 * std::abs(x)) {
      check_principal(x, E);
      return x;
    }
  }
  fail(ErrorKind::branch_ambiguity, "Newton inversion of phi did not converge");
}

Complex psi_map(Complex y, Complex E) {
  const Complex x = phi_inverse(y, E);
  return std::sqrt(inner(x, E)) / (x * (x + std::sqrt(E)));
}

series::Series psi_series(Complex E, std::size_t n) {
  using namespace series;
  const Complex rE = std::sqrt(E);
  // U = x − √E solves U·√(2√E + (2/3)U) = y; each sweep fixes one more order.
  Series y(n, 0.0);
  if (n > 1) y[1] = 1.0;
  Series U(n, 0.0);
  for (std::size_t it = 0; it <= n; ++it) {
    Series w = add(Series(n, 0.0), U, 2.0 / 3.0);
    w[0] += 2.0 * rE;
    U = mul(y, inverse(sqrt(w)));
  }
  Series w = add(Series(n, 0.0), U, 2.0 / 3.0);
  w[0] += 2.0 * rE;
  Series a = U, b = U;
  a[0] += rE;
  b[0] += 2.0 * rE;
  return mul(sqrt(w), inverse(mul(a, b)));
}

Complex NormalFormCoeffs::gamma_at(double h) const {
  Complex s = 0.0, hn = h;
  for (Complex g : gamma) {
    s += g * hn;
    hn *= h;
  }
  return s;
}

NormalFormCoeffs gamma_series(double E, double nu_tilde, int N, std::size_t budget) {
  using namespace series;
  if (!(E > 0.0)) fail(ErrorKind::invalid_argument, "normal form needs E > 0");
  if (N < 1) fail(ErrorKind::invalid_argument, "N must be at least 1");
  if (budget == 0) budget = 2 * static_cast<std::size_t>(N) + 4;
  if (budget < 2 * static_cast<std::size_t>(N) + 1) {
    fail(ErrorKind::order_too_high, "order " + std::to_string(N) + " needs a budget of at least " +
                                        std::to_string(2 * N + 1) + " coefficients");
  }
  NormalFormCoeffs out;
  out.E = E;
  out.nu_tilde = nu_tilde;
  out.budget = budget;
  const Series psi = scale(psi_series(E, budget), nu_tilde);  // ν̃ψ
  out.q.push_back(Series(budget, 0.0));
  out.m.push_back(constant(budget, 1.0));

  // γ₁ and q₁ from ν̃ψ(0) and ν̃ψ(y); higher orders use −i q_n′(0).
  for (int n = 0; n < N; ++n) {
    const Series& qn = out.q[n];
    const Series& mn = out.m[n];
    Complex g;
    Series bracket;
    if (n == 0) {
      g = psi[0];
      bracket = add(constant(budget, g), psi, -1.0);
    } else {
      const Series dq = derivative(qn);
      if (dq.empty()) fail(ErrorKind::order_too_high, "q table exhausted at order " + std::to_string(n));
      g = -kI * dq[0];
      bracket = add(constant(dq.size(), g), dq, kI);
      for (int j = 1; j <= n; ++j) bracket = add(bracket, scale(conj(out.m[n + 1 - j]), out.gamma[j - 1]));
      bracket = add(bracket, mul(psi, mn), -1.0);
    }
    out.gamma.push_back(g);
    Series q_next = scale(divide_by_y(bracket), -0.5);
    if (q_next.empty()) fail(ErrorKind::order_too_high, "q table exhausted at order " + std::to_string(n + 1));
    out.q.push_back(q_next);
    // m_{n+1}′ = i(Σ_{j=1}^{n+1} γ_j q̄_{n+2−j} + ν̃ψ q_{n+1})
    Series rhs = mul(psi, q_next);
    for (int j = 1; j <= n + 1; ++j) rhs = add(rhs, scale(conj(out.q[n + 2 - j]), out.gamma[j - 1]));
    out.m.push_back(integral(scale(rhs, kI)));
  }
  return out;
}

double sup_proxy(const series::Series& a, double rho) {
  double s = 0.0, r = 1.0;
  for (Complex c : a) {
    s += std::abs(c) * r;
    r *= rho;
  }
  return s;
}

GevreyFit gevrey_fit(const std::vector<double>& proxies, double t) {
  GevreyFit fit;
  fit.t = t;
  const std::size_t N = proxies.size();
  if (N == 0) return fit;
  auto shape = [&](std::size_t n) { return 2.0 * n * std::log(2.0 * n) - 2.0 * n * std::log(t); };
  // log p_n − shape(n) = log D + n log C
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!(proxies[i] > 0.0)) continue;
    const double n = static_cast<double>(i + 1), v = std::log(proxies[i]) - shape(i + 1);
    sx += n;
    sy += v;
    sxx += n * n;
    sxy += n * v;
    ++cnt;
  }
  double logC = 0.0, logD = cnt ? sy / cnt : 0.0;
  if (cnt >= 2) {
    logC = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    logD = (sy - logC * sx) / cnt;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!(proxies[i] > 0.0)) continue;
    const double n = static_cast<double>(i + 1);
    worst = std::max(worst, std::log(proxies[i]) - shape(i + 1) - logD - n * logC);
  }
  fit.C = std::exp(logC);
  fit.D = std::exp(logD + worst);
  fit.worst_ratio = std::exp(worst);
  return fit;
}

}  // namespace reslat
