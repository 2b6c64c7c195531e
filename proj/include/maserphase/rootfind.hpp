#pragma once

#include <functional>

namespace maser {

struct RootOptions {
  double x_tol = 1e-14;  // absolute bracket width target (plus 4 ulp of the root)
  int max_iter = 200;
};

// Safeguarded bracketing root finder (inverse quadratic / secant steps, falls
// back to bisection).  Requires f(lo) and f(hi) of opposite sign.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const RootOptions& opt = {});

// Scans [lo, hi] on a uniform grid of `samples` points and returns the first
// sign-change bracket refined by find_root; reports whether one was found.
struct ScanRootResult {
  bool found = false;
  double root = 0.0;
};
ScanRootResult scan_for_root(const std::function<double(double)>& f, double lo, double hi,
                             int samples, const RootOptions& opt = {});

}  // namespace maser
