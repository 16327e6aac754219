#include "reslat/transfer.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <limits>

#include "reslat/actions.hpp"

namespace reslat {

LogComplex LogComplex::from_value(Complex v) {
  if (v == 0.0) return {};
  return {std::log(v), false};
}

double LogComplex::log_abs() const { return zero ? -std::numeric_limits<double>::infinity() : log.real(); }

LogComplex operator*(const LogComplex& a, const LogComplex& b) {
  if (a.zero || b.zero) return {};
  return {a.log + b.log, false};
}

LogComplex operator+(const LogComplex& a, const LogComplex& b) {
  if (a.zero) return b;
  if (b.zero) return a;
  const LogComplex& big = a.log.real() >= b.log.real() ? a : b;
  const LogComplex& small = a.log.real() >= b.log.real() ? b : a;
  const Complex r = 1.0 + std::exp(small.log - big.log);
  if (r == 0.0) return {};
  return {big.log + std::log(r), false};
}

LogComplex operator-(const LogComplex& a) {
  if (a.zero) return a;
  return {a.log + Complex(0.0, kPi), false};
}

LogComplex TransferMatrix::det() const { return log_at(0, 0) * log_at(1, 1) + -(log_at(0, 1) * log_at(1, 0)); }

TransferMatrix TransferMatrix::operator*(const TransferMatrix& o) const {
  std::array<LogComplex, 4> e;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) e[2 * i + j] = log_at(i, 0) * o.log_at(0, j) + log_at(i, 1) * o.log_at(1, j);
  return TransferMatrix(TransferKind::product, e, inputs_);
}

namespace {

TransferInputs inputs_of(const ModelParams& p) { return {p.E, p.h, p.nu_tilde, 0.0, 0.0}; }

LogComplex lv(Complex v) { return LogComplex::from_value(v); }

}  // namespace

TransferMatrix transfer_T1(const ModelParams& p, Complex S01) {
  TransferInputs in = inputs_of(p);
  in.action = S01;
  return TransferMatrix(TransferKind::T1, {LogComplex::from_log(S01 / p.h), {}, {}, LogComplex::from_log(-S01 / p.h)},
                        in);
}

TransferMatrix transfer_T1(const ModelParams& p) { return transfer_T1(p, action_S01(p).value); }

Complex leading_t(const ModelParams& p) {
  return -std::sqrt(kPi * p.h / 2.0) * p.nu_tilde * std::pow(p.E, -0.75) * std::exp(Complex(0.0, -kPi / 4));
}

TransferMatrix transfer_T2(const ModelParams& p) {
  const Complex t = leading_t(p), s(0.0, -1.0);
  TransferInputs in = inputs_of(p);
  in.gamma = p.nu_tilde / std::sqrt(2.0) * std::pow(p.E, -0.75) * p.h;
  return TransferMatrix(TransferKind::T2, {lv(t), lv(s), lv(-std::conj(s)), lv(-std::conj(t))}, in);
}

TransferMatrix transfer_T3(const ModelParams& p, Complex S2inf) {
  TransferInputs in = inputs_of(p);
  in.action = S2inf;
  const Complex pre = std::log(2.0) + Complex(0.0, -kPi / 4);
  return TransferMatrix(TransferKind::T3,
                        {LogComplex::from_log(pre + S2inf / p.h), {}, {}, LogComplex::from_log(pre - S2inf / p.h)}, in);
}

TransferMatrix transfer_T3(const ModelParams& p) { return transfer_T3(p, action_S2inf(p).value); }

BranchingPQ branching_pq(Complex gamma, double h) {
  if (gamma == 0.0) fail(ErrorKind::invalid_argument, "branching matrix needs gamma != 0");
  if (!(h > 0.0)) fail(ErrorKind::invalid_argument, "h must be positive");
  const double a = std::norm(gamma) / (2.0 * h);
  gsl_sf_result lnr, arg;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  const int status = gsl_sf_lngamma_complex_e(1.0, -a, &lnr, &arg);
  gsl_set_error_handler(old);
  if (status != GSL_SUCCESS) fail(ErrorKind::invalid_argument, "log-gamma evaluation failed");
  const Complex lg(lnr.val, arg.val);
  const Complex common = Complex(0.5, -a) * std::log(h) - std::log(kI * gamma * std::sqrt(kPi)) + lg;
  BranchingPQ out;
  out.a = a;
  out.p = LogComplex::from_log(common + kPi * a / 2.0);
  out.q = LogComplex::from_log(common - kPi * a / 2.0);
  return out;
}

TransferMatrix branching_R(Complex gamma, double h) {
  const BranchingPQ pq = branching_pq(gamma, h);
  TransferInputs in;
  in.h = h;
  in.gamma = gamma;
  return TransferMatrix(TransferKind::R, {pq.p, pq.q, -pq.q, -pq.p}, in);
}

ExitCoefficients leading_exit_coefficients() {
  const double c = std::pow(2.0, 0.75);
  ExitCoefficients k;
  k.kl_plus = -c * std::exp(Complex(0.0, kPi / 8));
  k.kr_minus = -c * std::exp(Complex(0.0, -3.0 * kPi / 8));
  k.kl_minus = -kI * std::conj(k.kl_plus);
  k.kr_plus = kI * std::conj(k.kr_minus);
  return k;
}

TransferMatrix transfer_T2_branching(const ModelParams& p, Complex gamma) {
  const BranchingPQ pq = branching_pq(gamma, p.h);
  const ExitCoefficients k = leading_exit_coefficients();
  const LogComplex inv_q = LogComplex::from_log(-pq.q.log);
  const LogComplex p_over_q = pq.p * inv_q;
  // (q² − p²)/q
  const LogComplex qq = (pq.q * pq.q + -(pq.p * pq.p)) * inv_q;
  const LogComplex t = -(inv_q * lv(k.kl_plus / k.kr_plus));
  const LogComplex s = -(p_over_q * lv(k.kl_minus / k.kr_plus));
  const LogComplex s21 = -(p_over_q * lv(k.kl_plus / k.kr_minus));
  const LogComplex t22 = qq * lv(k.kl_minus / k.kr_minus);
  TransferInputs in = inputs_of(p);
  in.gamma = gamma;
  return TransferMatrix(TransferKind::T2, {t, s, s21, t22}, in);
}

}  // namespace reslat
