#pragma once

#include <algorithm>
#include <vector>

#include "reslat/core.hpp"

// Truncated Taylor series at 0, stored as coefficient vectors.  Results are
// as long as the shortest operand allows.
namespace reslat::series {

using Series = std::vector<Complex>;

inline Series add(const Series& a, const Series& b, Complex cb = 1.0) {
  Series out(std::min(a.size(), b.size()));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a[k] + cb * b[k];
  return out;
}

inline Series scale(Series a, Complex c) {
  for (auto& v : a) v *= c;
  return a;
}

inline Series mul(const Series& a, const Series& b) {
  Series out(std::min(a.size(), b.size()), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k)
    for (std::size_t j = 0; j <= k; ++j) out[k] += a[j] * b[k - j];
  return out;
}

inline Series inverse(const Series& a) {
  if (a.empty() || a[0] == 0.0) fail(ErrorKind::invalid_argument, "series inverse needs a nonzero constant term");
  Series out(a.size(), 0.0);
  out[0] = 1.0 / a[0];
  for (std::size_t k = 1; k < a.size(); ++k) {
    Complex s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += a[j] * out[k - j];
    out[k] = -s / a[0];
  }
  return out;
}

// Principal square root of the constant term.
inline Series sqrt(const Series& a) {
  if (a.empty() || a[0] == 0.0) fail(ErrorKind::invalid_argument, "series sqrt needs a nonzero constant term");
  Series out(a.size(), 0.0);
  out[0] = std::sqrt(a[0]);
  for (std::size_t k = 1; k < a.size(); ++k) {
    Complex s = a[k];
    for (std::size_t j = 1; j < k; ++j) s -= out[j] * out[k - j];
    out[k] = s / (2.0 * out[0]);
  }
  return out;
}

inline Series derivative(const Series& a) {
  if (a.size() <= 1) return {};
  Series out(a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) out[k - 1] = static_cast<double>(k) * a[k];
  return out;
}

// Antiderivative vanishing at 0.
inline Series integral(const Series& a) {
  Series out(a.size() + 1, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) out[k + 1] = a[k] / static_cast<double>(k + 1);
  return out;
}

// a(y)/y; the constant term is dropped and must be (numerically) zero.
inline Series divide_by_y(const Series& a) {
  if (a.empty()) return {};
  return Series(a.begin() + 1, a.end());
}

// Coefficientwise conjugate: the series of conj(a(conj y)).
inline Series conj(Series a) {
  for (auto& v : a) v = std::conj(v);
  return a;
}

inline Series truncate(Series a, std::size_t n) {
  if (a.size() > n) a.resize(n);
  return a;
}

inline Complex eval(const Series& a, Complex y) {
  Complex s = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * y + *it;
  return s;
}

}  // namespace reslat::series
