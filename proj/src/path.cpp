#include "reslat/path.hpp"

#include <algorithm>
#include <cmath>

namespace reslat {

double ComplexPath::length() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) s += std::abs(vertices[i + 1] - vertices[i]);
  return s;
}

ComplexPath ComplexPath::reversed() const {
  ComplexPath r;
  r.vertices.assign(vertices.rbegin(), vertices.rend());
  r.segment_info.assign(segment_info.rbegin(), segment_info.rend());
  return r;
}

double segment_distance(Complex a, Complex p, Complex q) {
  const Complex d = q - p;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(a - p);
  const double t = std::clamp(((a - p) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(a - (p + t * d));
}

BranchTracker::BranchTracker(std::vector<Factor> factors, Complex log_prefactor, double phase_quantum,
                             Complex start)
    : factors_(std::move(factors)), log_prefactor_(log_prefactor), quantum_(phase_quantum), point_(start) {
  args_.reserve(factors_.size());
  for (const auto& f : factors_) {
    if (start == f.root) fail(ErrorKind::turning_point_proximity, "tracker started on a branch point");
    args_.push_back(std::arg(start - f.root));
  }
}

Complex BranchTracker::log_value() const {
  Complex s = log_prefactor_;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    s += factors_[k].exponent * Complex(std::log(std::abs(point_ - factors_[k].root)), args_[k]);
  }
  return s;
}

Complex BranchTracker::log_value_at(Complex q) const {
  Complex s = log_prefactor_;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    const Complex a = factors_[k].root;
    const double arg = args_[k] + std::arg((q - a) / (point_ - a));
    s += factors_[k].exponent * Complex(std::log(std::abs(q - a)), arg);
  }
  return s;
}

Complex BranchTracker::value() const { return std::exp(log_value()); }

void BranchTracker::advance_to(Complex q, double min_distance, int exempt) {
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    const Complex a = factors_[k].root;
    if (static_cast<int>(k) != exempt && segment_distance(a, point_, q) < min_distance) {
      fail(ErrorKind::turning_point_proximity, "path passes too close to a branch point");
    }
    args_[k] += std::arg((q - a) / (point_ - a));
  }
  point_ = q;
}

void BranchTracker::advance_along(const std::vector<Complex>& route, double min_distance) {
  for (Complex q : route) advance_to(q, min_distance);
}

void BranchTracker::move_roots(const std::vector<Complex>& new_roots) {
  if (new_roots.size() != factors_.size()) fail(ErrorKind::invalid_argument, "root count mismatch");
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    args_[k] += std::arg((point_ - new_roots[k]) / (point_ - factors_[k].root));
    factors_[k].root = new_roots[k];
  }
}

void BranchTracker::normalize(Complex target) {
  const double delta = std::arg(target / value());
  log_prefactor_ += kI * (std::round(delta / quantum_) * quantum_);
}

}  // namespace reslat
