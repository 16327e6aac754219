#include "reslat/quantization.hpp"

#include <algorithm>
#include <cmath>

namespace reslat {

void Band::validate() const {
  if (!(a > 0.0 && b > a)) fail(ErrorKind::invalid_argument, "band needs 0 < a < b");
}

BsValue bs_condition(Complex E, double h, double nu_tilde, const ActionOptions& opt) {
  const double nu = nu_tilde * h;
  const ActionValue S = action_S01(E, nu, opt);
  const ActionValue dS = action_S01_dE(E, nu, opt);
  BsValue v;
  v.A = std::log(std::sqrt(kPi * h / 2.0) * nu_tilde) - 0.75 * std::log(E) + Complex(0.0, -kPi / 4) +
        2.0 * S.value / h;
  v.dA = -0.75 / E + 2.0 * dS.value / h;
  v.est_error = 2.0 * S.est_error / h;
  return v;
}

Complex bs_residual(Complex E, double h, double nu_tilde, int k, const ActionOptions& opt) {
  return bs_condition(E, h, nu_tilde, opt).A - Complex(0.0, kPi * (2 * k + 1));
}

int nearest_branch(Complex A) { return static_cast<int>(std::lround((A.imag() / kPi - 1.0) / 2.0)); }

std::string_view to_string(LatticeVariant v) {
  return v == LatticeVariant::stated ? "stated" : "sign_corrected";
}

Complex lattice_lambda(int k, double nu_tilde, double h, LatticeVariant v) {
  const double s = v == LatticeVariant::stated ? -4.0 : 4.0;
  const double re = 3.0 * kPi / 16.0 * (8.0 * k + s * nu_tilde + 5.0) * h;
  const double im = -0.375 * (h * std::log(1.0 / h) - h * std::log(kPi * nu_tilde * nu_tilde / (2.0 * re)));
  return {re, im};
}

std::vector<ResonanceRecord> lattice(double nu_tilde, double h, const Band& band, LatticeVariant v) {
  band.validate();
  if (!is_half_integer(nu_tilde) || nu_tilde <= 0.0) fail(ErrorKind::invalid_argument, "nu_tilde must be in N - 1/2");
  if (!(h > 0.0)) fail(ErrorKind::invalid_argument, "h must be positive");
  const double step = 1.5 * kPi * h;
  const double shift = 3.0 * kPi / 16.0 * ((v == LatticeVariant::stated ? -4.0 : 4.0) * nu_tilde + 5.0) * h;
  const int k0 = std::max(0, static_cast<int>(std::floor((band.a - shift) / step)) - 1);
  std::vector<ResonanceRecord> out;
  for (int k = k0;; ++k) {
    const Complex lam = lattice_lambda(k, nu_tilde, h, v);
    if (lam.real() >= band.b) break;
    if (lam.real() <= band.a) continue;
    ResonanceRecord r;
    r.k = k;
    r.nu_tilde = nu_tilde;
    r.lambda_lat = r.lambda = lam;
    r.E = std::pow(lam, 2.0 / 3.0);
    r.method = "lattice";
    out.push_back(r);
  }
  if (out.empty()) fail(ErrorKind::empty_band, "no lattice point with Re lambda in the band");
  return out;
}

namespace {

struct NewtonOutcome {
  Complex E;
  double residual;
  int iterations;
};

NewtonOutcome newton(int k, double nu_tilde, double h, Complex E, const SolveOptions& opt) {
  const Complex target(0.0, kPi * (2 * k + 1));
  for (int it = 1; it <= opt.max_iter; ++it) {
    if (!(E.real() > 0.0)) fail(ErrorKind::no_convergence, "Newton left the right half-plane");
    const BsValue v = bs_condition(E, h, nu_tilde, opt.action);
    const Complex res = v.A - target;
    if (!(std::abs(v.dA) > 1e-12 * std::abs(res))) fail(ErrorKind::non_simple_root, "derivative collapsed");
    Complex step = res / v.dA;
    // damp steps that would jump across several branches
    const double cap = 0.25 * std::abs(E);
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    E -= step;
    if (std::abs(res) < opt.tol && std::abs(step) < 1e-12 * std::abs(E)) return {E, std::abs(res), it};
    if (std::abs(step) < 1e-12 * std::abs(E)) {
      // step stalled on the quadrature floor; accept if the residual is there too
      const double r = std::abs(bs_residual(E, h, nu_tilde, k, opt.action));
      if (r < opt.tol) return {E, r, it};
    }
  }
  fail(ErrorKind::no_convergence, "no convergence in " + std::to_string(opt.max_iter) + " iterations");
}

}  // namespace

ResonanceRecord solve_resonance(int k, double nu_tilde, double h, std::optional<Complex> seed_E,
                                const SolveOptions& opt) {
  ResonanceRecord r;
  r.k = k;
  r.nu_tilde = nu_tilde;
  r.method = "bs-newton";
  r.lambda_lat = lattice_lambda(k, nu_tilde, h, opt.seed_lattice);
  const Complex first = seed_E ? *seed_E : std::pow(r.lambda_lat, 2.0 / 3.0);
  NewtonOutcome out;
  try {
    out = newton(k, nu_tilde, h, first, opt);
  } catch (const NumericError&) {
    out = newton(k, nu_tilde, h, std::pow(Complex(r.lambda_lat.real()), 2.0 / 3.0), opt);
  }
  r.E = out.E;
  r.lambda = std::pow(out.E, 1.5);
  r.residual = out.residual;
  r.iterations = out.iterations;
  return r;
}

std::vector<ResonanceRecord> resonance_set(const Band& band, double h, double nu_tilde_max, const SolveOptions& opt,
                                           LatticeVariant lattice_variant, unsigned threads) {
  band.validate();
  if (!(nu_tilde_max >= 0.5)) fail(ErrorKind::invalid_argument, "nu_tilde_max must be at least 1/2");
  std::vector<ResonanceRecord> jobs;
  for (double nt = 0.5; nt <= nu_tilde_max + 1e-12; nt += 1.0) {
    try {
      const auto l = lattice(nt, h, band, lattice_variant);
      jobs.insert(jobs.end(), l.begin(), l.end());
    } catch (const NumericError& e) {
      if (e.kind() != ErrorKind::empty_band) throw;
    }
  }
  std::vector<ResonanceRecord> out(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        const ResonanceRecord& j = jobs[i];
        SolveOptions o = opt;
        o.seed_lattice = lattice_variant;
        try {
          out[i] = solve_resonance(j.k, j.nu_tilde, h, std::pow(j.lambda_lat, 2.0 / 3.0), o);
          out[i].lambda_lat = j.lambda_lat;
        } catch (const NumericError& e) {
          out[i] = j;
          out[i].method = "bs-newton";
          out[i].error = e.what();
        }
      },
      threads);

  std::vector<ResonanceRecord> dedup;
  for (const auto& r : out) {
    const bool dup = r.error.empty() && std::any_of(dedup.begin(), dedup.end(), [&](const ResonanceRecord& s) {
                       return s.error.empty() && std::abs(s.lambda - r.lambda) < 1e-8;
                     });
    if (!dup) dedup.push_back(r);
  }
  return dedup;
}

std::vector<double> pplus_levels(double h, int l, int kmax) {
  if (l < 1) fail(ErrorKind::invalid_argument, "P+ levels need l >= 1");
  if (!(h > 0.0)) fail(ErrorKind::invalid_argument, "h must be positive");
  std::vector<double> out;
  const double c = std::sqrt(l * l - 0.25);
  for (int k = 0; k <= kmax; ++k) {
    const double bracket = 2.0 * k + 1.0 - c;
    if (bracket <= 0.0) continue;
    out.push_back(std::pow(0.75 * kPi * bracket * h, 2.0 / 3.0));
  }
  return out;
}

double pplus_residual(double E, double h, int l, const ActionOptions& opt) {
  return std::abs(std::exp(2.0 * action_S12(E, h, l, opt).value / h) + 1.0);
}

}  // namespace reslat
