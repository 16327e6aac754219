#include "reslat/contour.hpp"

namespace reslat {

ActionValue integrate_tracked(BranchTracker tracker, std::span<const Complex> route, const TrackedIntegrand& f,
                              const TrackedOptions& opt, ComplexPath* record) {
  ActionValue out{0.0, 0.0, 0};
  if (record) {
    record->vertices = {tracker.point()};
    record->segment_info.clear();
  }
  const double seg_tol = opt.tol / static_cast<double>(std::max<std::size_t>(route.size(), 1));
  for (std::size_t i = 0; i < route.size(); ++i) {
    const Complex p = tracker.point(), q = route[i];
    const bool last = i + 1 == route.size();
    const bool singular_end = last && opt.end_root >= 0;
    const Complex d = q - p;
    // proximity is checked before any evaluation on the segment
    BranchTracker next = tracker;
    next.advance_to(singular_end ? p + 0.999 * d : q, opt.min_distance, singular_end ? opt.end_root : -1);
    RealToComplex g;
    if (singular_end) {
      g = [&](double s) {
        const double w = 1.0 - s;
        const Complex x = p + d * (1.0 - w * w);
        return f(x, tracker.value_at(x)) * d * (2.0 * w);
      };
    } else {
      g = [&](double s) {
        const Complex x = p + d * s;
        return f(x, tracker.value_at(x)) * d;
      };
    }
    QuadOptions qo;
    qo.abs_tol = seg_tol;
    qo.max_evals = opt.max_evals;
    const QuadResult r = integrate(g, 0.0, 1.0, qo);
    out.value += r.value;
    out.est_error += r.error;
    out.n_evals += r.evals;
    if (record) {
      record->vertices.push_back(q);
      record->segment_info.push_back({r.evals, r.error});
    }
    tracker = std::move(next);
  }
  return out;
}

}  // namespace reslat
