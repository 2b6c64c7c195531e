#pragma once

#include <functional>
#include <vector>

namespace maser {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 52;
};

// One integration segment.  sing_lo/sing_hi flag integrable (log-type)
// divergences of the integrand at the respective end; the rules below never
// evaluate exactly on a flagged end.
struct Segment {
  double lo;
  double hi;
  bool sing_lo = false;
  bool sing_hi = false;
};

// Adaptive Simpson on one segment.  Flagged singular ends are peeled off in
// dyadic shells; each shell is smooth inside and integrated adaptively.
double integrate_adaptive(const std::function<double(double)>& f, const Segment& seg,
                          const QuadratureOptions& opt = {});

// Fixed-grid composite Simpson for integrands carrying an oscillation of
// `cycles_per_unit` periods per unit length: at least 20 nodes per period.
// A doubled-grid pass supplies the error estimate.  Singular ends peeled as
// above.
double integrate_oscillatory(const std::function<double(double)>& f, const Segment& seg,
                             double cycles_per_unit, const QuadratureOptions& opt = {});

// Splits [lo, hi] at the interior breakpoints (sorted, may lie outside; those
// are ignored) and sums the chosen rule over the pieces.  knot_singular marks
// every breakpoint, plus possibly the outer ends, as log-singular.
double integrate_split(const std::function<double(double)>& f, double lo, double hi,
                       const std::vector<double>& breakpoints, bool knot_singular,
                       bool lo_singular, double cycles_per_unit = 0.0,
                       const QuadratureOptions& opt = {});

}  // namespace maser
