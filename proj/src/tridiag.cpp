#include "maserphase/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maserphase/errors.hpp"

namespace maser {

std::int64_t sturm_count(const std::vector<double>& diag,
                         const std::vector<double>& off, double x) {
  const std::size_t n = diag.size();
  std::int64_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double offsq = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    d = (diag[i] - x) - offsq / d;
    // exact zero would poison the recurrence; nudge keeps the sign count
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

std::vector<double> smallest_eigenvalues(const std::vector<double>& diag,
                                         const std::vector<double>& off,
                                         int m, double tol) {
  const std::size_t n = diag.size();
  if (n == 0 || off.size() + 1 != n)
    throw DomainError("smallest_eigenvalues: size mismatch");
  if (m < 1 || static_cast<std::size_t>(m) > n)
    throw DomainError("smallest_eigenvalues: bad count");

  double glo = std::numeric_limits<double>::infinity();
  double ghi = -glo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) +
               (i + 1 < n ? std::abs(off[i]) : 0.0);
    glo = std::min(glo, diag[i] - r);
    ghi = std::max(ghi, diag[i] + r);
  }
  const double scale = std::max({std::abs(glo), std::abs(ghi), 1.0});
  const double width =
      tol > 0.0 ? tol
                : 8.0 * std::numeric_limits<double>::epsilon() * scale;

  std::vector<double> out;
  out.reserve(m);
  double lo_bound = glo;
  for (int j = 1; j <= m; ++j) {
    double lo = lo_bound, hi = ghi;
    // invariant: count(lo) < j <= count(hi + eps); bisect to the j-th value
    while (hi - lo > width) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (sturm_count(diag, off, mid) >= j)
        hi = mid;
      else
        lo = mid;
    }
    out.push_back(0.5 * (lo + hi));
    lo_bound = lo;  // later eigenvalues cannot lie below this bracket
  }
  return out;
}

std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() + 1 != n || upper.size() + 1 != n || rhs.size() != n)
    throw DomainError("solve_tridiagonal: size mismatch");
  std::vector<double> c(n - 1);
  double piv = diag[0];
  if (piv == 0.0) throw DomainError("solve_tridiagonal: zero pivot");
  rhs[0] /= piv;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    c[i] = upper[i] / piv;
    piv = diag[i + 1] - lower[i] * c[i];
    if (piv == 0.0) throw DomainError("solve_tridiagonal: zero pivot");
    rhs[i + 1] = (rhs[i + 1] - lower[i] * rhs[i]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

}  // namespace maser
