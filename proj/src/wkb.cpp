#include "reslat/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "reslat/quadrature.hpp"

namespace reslat {

Complex wronskian(const Vec2& u, const Vec2& v) { return u[0] * v[1] - u[1] * v[0]; }

namespace {

int find_root_index(const SymbolBranch& b, Complex x) {
  return b.root_index_at(x, 1e-10 * std::max(1.0, std::abs(x)));
}

TrackedOptions tracked_options(const SymbolBranch& b, const ActionOptions& opt, int end_root) {
  TrackedOptions t;
  t.tol = opt.tol;
  t.max_evals = opt.max_evals;
  t.min_distance = opt.proximity > 0 ? opt.proximity : b.proximity();
  t.end_root = end_root;
  return t;
}

Complex phase_density(Complex x, Complex F) { return F / x; }

}  // namespace

PhaseValue phase_z(const SymbolBranch& at_base, std::span<const Complex> route, const ActionOptions& opt) {
  PhaseValue out;
  out.base_point = at_base.point();
  if (route.empty()) {
    out.z = 0.0;
    out.path.vertices = {out.base_point};
    return out;
  }
  if (at_base.point() == 0.0) fail(ErrorKind::invalid_argument, "the phase is singular at the origin");
  for (Complex x : route)
    if (x == 0.0) fail(ErrorKind::turning_point_proximity, "route passes through the origin");
  const int end_root = find_root_index(at_base, route.back());
  const ActionValue v =
      integrate_tracked(at_base.root_tracker(), route, phase_density, tracked_options(at_base, opt, end_root), &out.path);
  out.z = v.value;
  out.est_error = v.est_error;
  return out;
}

PhaseValue phase_from_turning_point(const SymbolBranch& at_x, std::span<const Complex> route_to_tp,
                                    const ActionOptions& opt) {
  if (route_to_tp.empty()) fail(ErrorKind::invalid_argument, "empty route");
  if (find_root_index(at_x, route_to_tp.back()) < 0) {
    fail(ErrorKind::invalid_argument, "route does not end at a turning point");
  }
  PhaseValue forward = phase_z(at_x, route_to_tp, opt);
  PhaseValue out;
  out.z = -forward.z;
  out.base_point = route_to_tp.back();
  out.path = forward.path.reversed();
  out.est_error = forward.est_error;
  return out;
}

namespace {

const GaussPanel& panel_rule(int order) {
  static thread_local std::vector<std::unique_ptr<GaussPanel>> cache;
  for (auto& p : cache)
    if (p->order() == order) return *p;
  cache.push_back(std::make_unique<GaussPanel>(order));
  return *cache.back();
}

struct Panel {
  Complex a, b;
  std::vector<Complex> dz;  // √(g₊g₋)·(b − a)/2 at the nodes
  std::vector<Complex> z;   // phase at the nodes
  std::vector<Complex> F;   // (H′/H)·(b − a)/2 at the nodes
  Complex za, zb;
  double sa = 0.0, sb = 0.0;  // segment parameter range
};

class PanelBuilder {
 public:
  PanelBuilder(const WkbSystem& sys, SymbolBranch branch, const AmplitudeOptions& opt)
      : sys_(sys), branch_(std::move(branch)), opt_(opt), rule_(panel_rule(opt.panel_order)) {
    singular_.push_back(0.0);
    for (const auto& f : branch_.root_tracker().factors()) singular_.push_back(f.root);
  }

  // Panels for the straight move from the current point to q.
  std::vector<Panel> segment(Complex q) {
    std::vector<Panel> out;
    const Complex p = branch_.point();
    split(p, q, 0.0, 1.0, out, 0);
    return out;
  }

  Complex z() const { return z_; }
  const SymbolBranch& branch() const { return branch_; }

 private:
  double clearance(Complex a, Complex b) const {
    double d = 1e300;
    for (Complex s : singular_) d = std::min(d, segment_distance(s, a, b));
    return d;
  }

  void split(Complex p, Complex q, double s0, double s1, std::vector<Panel>& out, int depth) {
    const Complex a = p + (q - p) * s0, b = p + (q - p) * s1;
    if (depth > 60) fail(ErrorKind::quadrature_failure, "amplitude panel refinement did not terminate");
    const bool short_enough = std::abs(b - a) <= 0.5 * clearance(a, b);
    if (short_enough) {
      Panel pan = make(a, b);
      if (std::abs(2.0 * (pan.zb - pan.za) / sys_.h) <= opt_.panel_phase) {
        pan.sa = s0;
        pan.sb = s1;
        branch_.advance_to(b);
        z_ = pan.zb;
        out.push_back(std::move(pan));
        return;
      }
    }
    const double sm = 0.5 * (s0 + s1);
    split(p, q, s0, sm, out, depth + 1);
    split(p, q, sm, s1, out, depth + 1);
  }

  Panel make(Complex a, Complex b) const {
    const int n = rule_.order();
    const Complex half = 0.5 * (b - a);
    Panel pan;
    pan.a = a;
    pan.b = b;
    pan.za = z_;
    pan.dz.resize(n);
    pan.z.resize(n);
    pan.F.resize(n);
    const BranchTracker& tr = branch_.root_tracker();
    for (int j = 0; j < n; ++j) {
      const Complex x = a + half * (rule_.nodes()[j] + 1.0);
      pan.dz[j] = tr.value_at(x) / x * half;
      pan.F[j] = log_derivative_H(x, sys_.E, sys_.nu) * half;
    }
    Complex total = 0.0;
    for (int j = 0; j < n; ++j) total += rule_.weights()[j] * pan.dz[j];
    for (int k = 0; k < n; ++k) {
      Complex s = 0.0;
      for (int j = 0; j < n; ++j) s += rule_.cumulative(k, j) * pan.dz[j];
      pan.z[k] = z_ + s;
    }
    pan.zb = z_ + total;
    return pan;
  }

  WkbSystem sys_;
  SymbolBranch branch_;
  AmplitudeOptions opt_;
  const GaussPanel& rule_;
  std::vector<Complex> singular_;
  Complex z_ = 0.0;
};

Complex phase_at(const Panel& pan, const GaussPanel& rule, double s) {
  const double t = 2.0 * (s - pan.sa) / (pan.sb - pan.sa) - 1.0;
  const auto row = rule.cumulative_row(std::clamp(t, -1.0, 1.0));
  Complex z = pan.za;
  for (int j = 0; j < rule.order(); ++j) z += row[j] * pan.dz[j];
  return z;
}

void check_monotone(const std::vector<Panel>& panels, const GaussPanel& rule, int sign, const AmplitudeOptions& opt) {
  const int m = opt.monotone_samples;
  double prev = 0.0;
  std::size_t k = 0;
  for (int i = 0; i <= m; ++i) {
    const double s = static_cast<double>(i) / m;
    while (k + 1 < panels.size() && panels[k].sb < s) ++k;
    const Complex z = phase_at(panels[k], rule, s);
    const double v = sign * z.real();
    if (i > 0 && v < prev - opt.monotone_tol * (1.0 + std::abs(z))) {
      const Complex x = 0.5 * (panels[k].a + panels[k].b);
      fail(ErrorKind::monotonicity_violation, "sign*Re z decreases near x = " + std::to_string(x.real()) + " + " +
                                                  std::to_string(x.imag()) + "i");
    }
    prev = v;
  }
}

}  // namespace

AmplitudeProfile amplitude_recurrence(const WkbSystem& sys, const SymbolBranch& at_base,
                                      std::span<const Complex> route, int sign, int N,
                                      const AmplitudeOptions& opt) {
  if (sign != 1 && sign != -1) fail(ErrorKind::invalid_argument, "sign must be +1 or -1");
  if (N < 0) fail(ErrorKind::invalid_argument, "negative truncation order");
  if (!(sys.h > 0.0)) fail(ErrorKind::invalid_argument, "h must be positive");
  if (at_base.E() != sys.E || at_base.nu() != sys.nu) {
    fail(ErrorKind::invalid_argument, "branch state belongs to a different system");
  }
  if (at_base.point() == 0.0) fail(ErrorKind::invalid_argument, "use origin_series for the origin");

  const GaussPanel& rule = panel_rule(opt.panel_order);
  const int n = rule.order();
  PanelBuilder builder(sys, at_base, opt);

  AmplitudeProfile prof;
  std::vector<Complex> A(N + 1, 0.0);
  A[0] = 1.0;
  auto record = [&](Complex x, Complex z) {
    Complex we = 0.0, wo = 0.0;
    for (int k = 0; k <= N; ++k) (k % 2 == 0 ? we : wo) += A[k];
    prof.x.push_back(x);
    prof.z.push_back(z);
    prof.w_even.push_back(we);
    prof.w_odd.push_back(wo);
  };
  record(at_base.point(), 0.0);

  const double c = 2.0 * sign / sys.h;
  std::vector<std::vector<Complex>> W(N + 1, std::vector<Complex>(n, 0.0));
  std::vector<Complex> next(N + 1);
  for (Complex q : route) {
    const std::vector<Panel> panels = builder.segment(q);
    check_monotone(panels, rule, sign, opt);
    for (const Panel& pan : panels) {
      std::fill(W[0].begin(), W[0].end(), Complex(1.0));
      next[0] = 1.0;
      for (int k = 1; k <= N; ++k) {
        const bool odd = k % 2 == 1;
        for (int i = 0; i < n; ++i) {
          Complex s = odd ? std::exp(c * (pan.za - pan.z[i])) * A[k] : A[k];
          for (int j = 0; j < n; ++j) {
            const Complex e = odd ? std::exp(c * (pan.z[j] - pan.z[i])) : 1.0;
            s += rule.cumulative(i, j) * e * pan.F[j] * W[k - 1][j];
          }
          W[k][i] = s;
        }
        Complex s = odd ? std::exp(c * (pan.za - pan.zb)) * A[k] : A[k];
        for (int j = 0; j < n; ++j) {
          const Complex e = odd ? std::exp(c * (pan.z[j] - pan.zb)) : 1.0;
          s += rule.weights()[j] * e * pan.F[j] * W[k - 1][j];
        }
        next[k] = s;
      }
      A = next;
      record(pan.b, pan.zb);
    }
  }

  prof.terms = A;
  prof.z_end = prof.z.back();
  prof.H_end = builder.branch().H();
  prof.end.w_even = prof.w_even.back();
  prof.end.w_odd = prof.w_odd.back();
  prof.end.N = N;
  prof.end.base_point = at_base.point();
  prof.end.remainder = N > 0 ? std::abs(A[N]) : 0.0;
  return prof;
}

Vec2 wkb_solution(int sign, Complex z, Complex H, Complex w_even, Complex w_odd, double h) {
  const Complex a = 1.0 / H, b = static_cast<double>(sign) * kI * H;
  const Complex e = std::exp(static_cast<double>(sign) * z / h);
  return {e * ((a - b) * w_even + (a + b) * w_odd), e * ((-a - b) * w_even + (-a + b) * w_odd)};
}

OriginSeries origin_series(const WkbSystem& sys, double rho, int N, bool require_convergence) {
  if (!(sys.nu > 0.0)) fail(ErrorKind::invalid_argument, "origin series needs nu > 0");
  if (!(rho >= 0.0)) fail(ErrorKind::invalid_argument, "rho must be non-negative");
  OriginSeries out;
  out.pair.N = N;
  out.pair.base_point = 0.0;
  out.terms.assign(N + 1, 0.0);
  out.terms[0] = 1.0;
  if (rho == 0.0) return out;

  // Below rho_min every w⁰_n, n ≥ 1, is O(rho_min·E/ν) and is dropped.
  const double scale = sys.nu / std::max(1.0, std::abs(sys.E));
  const double rho_min = 1e-14 * std::min(rho, scale);
  SymbolBranch b = SymbolBranch::at_origin(sys.E, sys.nu);
  b.advance_to(Complex(0.0, rho_min));
  const Complex end(0.0, rho);
  const AmplitudeProfile prof = amplitude_recurrence(sys, b, std::span<const Complex>(&end, 1), +1, N);

  out.terms = prof.terms;
  out.pair.w_even = prof.end.w_even;
  out.pair.w_odd = prof.end.w_odd;
  out.pair.remainder = prof.end.remainder;
  if (require_convergence && N >= 2) {
    const double tail = std::abs(out.terms[N]) + std::abs(out.terms[N - 1]);
    const double size = std::abs(out.pair.w_even) + std::abs(out.pair.w_odd);
    if (tail > 1e-8 * (1.0 + size)) {
      fail(ErrorKind::convergence_failure, "origin series tail " + std::to_string(tail) + " at order " +
                                               std::to_string(N));
    }
  }
  return out;
}

double origin_bound(double E, double nu, double tau, int n) {
  const double K = 1.0 + 3.0 * nu * nu * tau * tau / (E * E * E);
  return std::pow(K * tau / (1.0 + tau), n) / std::tgamma(n + 1.0);
}

ConnectionC0 connection_c0(const ModelParams& p) {
  ConnectionC0 c;
  const double R = 0.5 * std::sqrt(std::abs(p.E));
  const OriginSeries s = origin_series(WkbSystem::from(p), R, 16, false);
  c.o1_estimate = std::abs(s.pair.w_even - 1.0);
  return c;
}

}  // namespace reslat
