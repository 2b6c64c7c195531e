#include "maserphase/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maserphase/errors.hpp"

namespace maser {

namespace {

using Fn = std::function<double(double)>;

double eval_checked(const Fn& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw QuadratureError("integrand not finite inside segment");
  return v;
}

double simpson_rec(const Fn& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = eval_checked(f, lm), frm = eval_checked(f, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double err = (left + right - whole) / 15.0;
  if (depth <= 0 || std::abs(err) <= tol) {
    if (depth <= 0 && std::abs(err) > tol)
      throw QuadratureError("adaptive Simpson: depth budget exhausted");
    return left + right + err;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double simpson_smooth(const Fn& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = eval_checked(f, a), fm = eval_checked(f, m), fb = eval_checked(f, b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double composite_simpson(const Fn& f, double a, double b, long n_half) {
  // 2*n_half intervals
  const long n = 2 * n_half;
  const double h = (b - a) / static_cast<double>(n);
  double s = eval_checked(f, a) + eval_checked(f, b);
  for (long i = 1; i < n; i += 2) s += 4.0 * eval_checked(f, a + i * h);
  for (long i = 2; i < n; i += 2) s += 2.0 * eval_checked(f, a + i * h);
  return s * h / 3.0;
}

double osc_smooth(const Fn& f, double a, double b, double cycles_per_unit, double tol) {
  if (a == b) return 0.0;
  const double len = std::abs(b - a);
  // start above the Nyquist density of the cosine, then double to tolerance
  long n_half = static_cast<long>(std::ceil(std::max(10.0 * cycles_per_unit * len, 16.0)));
  double coarse = composite_simpson(f, a, b, n_half);
  for (int pass = 0; pass < 12; ++pass) {
    const double fine = composite_simpson(f, a, b, 2 * n_half);
    const double err = (fine - coarse) / 15.0;
    if (std::abs(err) <= std::max(tol, 1e-14 * std::abs(fine))) return fine + err;
    coarse = fine;
    n_half *= 2;
  }
  throw QuadratureError("oscillatory rule: doubled grid disagrees");
}

// Peels a log-singular end in dyadic shells; `piece` integrates one smooth
// shell.  The shell sum converges geometrically for any integrable power or
// log divergence.
template <typename Piece>
double peel_end(double from, double to, double shell_tol, const Piece& piece) {
  // singular at `from`; shells approach it from `to`
  double total = 0.0;
  double outer = to;
  int quiet = 0;
  for (int j = 0; j < 2000; ++j) {
    const double inner = from + 0.5 * (outer - from);
    const double c = piece(inner, outer);
    total += c;
    outer = inner;
    if (std::abs(c) < shell_tol) {
      if (++quiet >= 2) return total;
    } else {
      quiet = 0;
    }
    if (std::abs(outer - from) <= std::abs(from) * 1e-17 + 5e-300) return total;
  }
  throw QuadratureError("singular end: shell sum did not settle");
}

template <typename Rule>
double integrate_segment(const Segment& seg, const QuadratureOptions& opt, const Rule& rule) {
  if (seg.lo == seg.hi) return 0.0;
  if (seg.hi < seg.lo) throw QuadratureError("segment with hi < lo");
  const double shell_tol = opt.abs_tol / 128.0;
  if (!seg.sing_lo && !seg.sing_hi) return rule(seg.lo, seg.hi, opt.abs_tol);
  const double mid = 0.5 * (seg.lo + seg.hi);
  double total = 0.0;
  if (seg.sing_lo)
    total += peel_end(seg.lo, mid, shell_tol,
                      [&](double x0, double x1) { return rule(x0, x1, shell_tol); });
  else
    total += rule(seg.lo, mid, 0.5 * opt.abs_tol);
  if (seg.sing_hi)
    total += peel_end(seg.hi, mid, shell_tol,
                      [&](double x0, double x1) { return rule(x1, x0, shell_tol); });
  else
    total += rule(mid, seg.hi, 0.5 * opt.abs_tol);
  return total;
}

}  // namespace

double integrate_adaptive(const Fn& f, const Segment& seg, const QuadratureOptions& opt) {
  return integrate_segment(seg, opt, [&](double a, double b, double tol) {
    double sgn = 1.0;
    if (b < a) {
      std::swap(a, b);
      sgn = -1.0;
    }
    return sgn * simpson_smooth(f, a, b, tol, opt.max_depth);
  });
}

double integrate_oscillatory(const Fn& f, const Segment& seg, double cycles_per_unit,
                             const QuadratureOptions& opt) {
  return integrate_segment(seg, opt, [&](double a, double b, double tol) {
    double sgn = 1.0;
    if (b < a) {
      std::swap(a, b);
      sgn = -1.0;
    }
    return sgn * osc_smooth(f, a, b, cycles_per_unit, tol);
  });
}

double integrate_split(const Fn& f, double lo, double hi, const std::vector<double>& breakpoints,
                       bool knot_singular, bool lo_singular, double cycles_per_unit,
                       const QuadratureOptions& opt) {
  if (hi < lo) throw QuadratureError("integrate_split: hi < lo");
  const double snap = 1e-12 * (std::abs(lo) + std::abs(hi) + 1.0);
  bool hi_singular = false;
  std::vector<double> knots{lo};
  for (double bp : breakpoints) {
    if (knot_singular && std::abs(bp - lo) <= snap) lo_singular = true;
    if (knot_singular && std::abs(bp - hi) <= snap) hi_singular = true;
    if (bp > lo + snap && bp < hi - snap) knots.push_back(bp);
  }
  std::sort(knots.begin() + 1, knots.end());
  knots.push_back(hi);

  QuadratureOptions piece_opt = opt;
  piece_opt.abs_tol = opt.abs_tol / static_cast<double>(knots.size());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    Segment seg{knots[i], knots[i + 1], false, false};
    seg.sing_lo = (i == 0) ? lo_singular : knot_singular;
    seg.sing_hi = (i + 2 == knots.size()) ? hi_singular : knot_singular;
    total += (cycles_per_unit > 0.0) ? integrate_oscillatory(f, seg, cycles_per_unit, piece_opt)
                                     : integrate_adaptive(f, seg, piece_opt);
  }
  return total;
}

}  // namespace maser
