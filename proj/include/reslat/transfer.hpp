#pragma once

#include <array>

#include "reslat/core.hpp"

namespace reslat {

// Nonzero value held as its logarithm, or an exact zero.
struct LogComplex {
  Complex log{0.0, 0.0};
  bool zero = true;

  static LogComplex from_value(Complex v);
  static LogComplex from_log(Complex l) { return {l, false}; }
  Complex value() const { return zero ? Complex(0.0) : std::exp(log); }
  double log_abs() const;  // −inf for zero
};

LogComplex operator*(const LogComplex& a, const LogComplex& b);
LogComplex operator+(const LogComplex& a, const LogComplex& b);
LogComplex operator-(const LogComplex& a);

enum class TransferKind { T1, T2, T3, R, product };

struct TransferInputs {
  Complex E;
  double h = 0.0;
  double nu_tilde = 0.0;
  Complex action;  // S₀₁ for T1, S₂∞ for T3
  Complex gamma;   // normal-form constant for T2 and R
};

class TransferMatrix {
 public:
  TransferMatrix() = default;
  TransferMatrix(TransferKind kind, std::array<LogComplex, 4> entries, TransferInputs inputs = {})
      : kind_(kind), e_(entries), inputs_(inputs) {}

  TransferKind kind() const { return kind_; }
  const TransferInputs& inputs() const { return inputs_; }
  const LogComplex& log_at(int i, int j) const { return e_[2 * i + j]; }
  Complex at(int i, int j) const { return log_at(i, j).value(); }
  LogComplex det() const;

  TransferMatrix operator*(const TransferMatrix& o) const;

 private:
  TransferKind kind_ = TransferKind::product;
  std::array<LogComplex, 4> e_{};
  TransferInputs inputs_{};
};

// diag(e^{S₀₁/h}, e^{−S₀₁/h}).
TransferMatrix transfer_T1(const ModelParams& p, Complex S01);
TransferMatrix transfer_T1(const ModelParams& p);

// Leading order (t, s; −s̄, −t̄) with t = −√(πh/2)ν̃E^{−3/4}e^{−iπ/4}, s = −i.
TransferMatrix transfer_T2(const ModelParams& p);
Complex leading_t(const ModelParams& p);

// 2e^{−iπ/4} diag(e^{S₂∞/h}, e^{−S₂∞/h}).
TransferMatrix transfer_T3(const ModelParams& p, Complex S2inf);
TransferMatrix transfer_T3(const ModelParams& p);

struct BranchingPQ {
  LogComplex p, q;
  double a = 0.0;  // |γ|²/(2h)
};

BranchingPQ branching_pq(Complex gamma, double h);
// (p, q; −q, −p).
TransferMatrix branching_R(Complex gamma, double h);

// Leading exit coefficients of the normal-form solutions.
struct ExitCoefficients {
  Complex kl_plus, kl_minus, kr_plus, kr_minus;
};
ExitCoefficients leading_exit_coefficients();

// T₂ = B_r⁻¹B_l assembled entry by entry from p, q and the exit coefficients.
TransferMatrix transfer_T2_branching(const ModelParams& p, Complex gamma);

}  // namespace reslat
