#include "maserphase/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maserphase/errors.hpp"

namespace maser {

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const RootOptions& opt) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw DomainError("find_root: no sign change on the supplied bracket");

  // b tracks the best iterate, a the previous one, c the contrapoint
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < opt.max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * opt.x_tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
  }
  throw DomainError("find_root: iteration budget exhausted");
}

ScanRootResult scan_for_root(const std::function<double(double)>& f, double lo, double hi,
                             int samples, const RootOptions& opt) {
  if (samples < 2) throw DomainError("scan_for_root: need at least 2 samples");
  double x_prev = lo, f_prev = f(lo);
  if (f_prev == 0.0) return {true, lo};
  for (int i = 1; i < samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
    const double fx = f(x);
    if (fx == 0.0) return {true, x};
    if ((f_prev > 0.0) != (fx > 0.0)) return {true, find_root(f, x_prev, x, opt)};
    x_prev = x;
    f_prev = fx;
  }
  return {false, 0.0};
}

}  // namespace maser
