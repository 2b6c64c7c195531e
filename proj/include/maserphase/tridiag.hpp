#pragma once

#include <cstdint>
#include <vector>

namespace maser {

// Symmetric tridiagonal eigenvalue tools. diag has n entries, off has n-1.

// Number of eigenvalues strictly below x, from the Sturm sequence signs.
std::int64_t sturm_count(const std::vector<double>& diag,
                         const std::vector<double>& off, double x);

// The m algebraically smallest eigenvalues, ascending, by bisection inside
// the Gershgorin bounds. tol <= 0 picks a width near machine precision at
// the matrix scale.
std::vector<double> smallest_eigenvalues(const std::vector<double>& diag,
                                         const std::vector<double>& off,
                                         int m, double tol = 0.0);

// Thomas elimination for a general tridiagonal system; lower/upper have
// n-1 entries. No pivoting: callers pass diagonally dominant systems.
std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      std::vector<double> rhs);

}  // namespace maser
