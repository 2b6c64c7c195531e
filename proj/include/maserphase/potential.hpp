#pragma once

#include <map>
#include <vector>

#include "maserphase/params.hpp"

namespace maser {

// ===== effective potential =====

// w(x) = (n_b x + a q(x)) / ((1+n_b) x + b q(x)); at x = 0 the q ~ x
// theta_eff^2 expansion gives w(0) = (n_b + a th_eff^2)/(1+n_b + b th_eff^2),
// which is the geometric ratio of the thermal phase.
double w_of_x(double x, const ModelParams& params);

// V_0(x) = -int_0^x ln w(nu) dnu.  Finite also across trapping zeros of q at
// n_b = 0 (the log singularity is integrable and the quadrature splits there).
double V0(double x, const ModelParams& params, double quad_tol = 1e-10);

// Oscillatory Poisson term -int_0^x ln w(nu) cos(2 pi N k nu) dnu, |k| <= 32.
double Vk_correction(double x, const ModelParams& params, int k, double quad_tol = 1e-10);

// p(x) = p0 sqrt(w(x)/w(0)) exp(-N sum_{|k|<=K} V_k(x)) on the grid,
// normalized so that N * sum_i p(x_i) dx_i = 1.  K = 0 is the smooth
// large-N envelope; on the lattice x = n/N the k != 0 terms are
// 1/N-suppressed.
std::vector<double> asymptotic_p(const ModelParams& params, int K,
                                 const std::vector<double>& grid, double quad_tol = 1e-10);

// ===== saddle-point branches =====

// k-th positive root of tan(phi) = phi, bracketed in (k pi, k pi + pi/2).
double critical_phi(int k, double tol = 1e-12);

// Onset theta0* = phi0/(|sin phi0| sqrt(a-b)), phi0 = arcsin(|Delta|/sqrt(a-b));
// both require a > (1+Delta^2)/2.
double theta0_star(const ModelParams& params);
double theta_k(const ModelParams& params, int k);

enum class SubBranch { Minimum, Maximum };

// One monotone sub-branch of the parametric saddle family
//   x + Delta^2 = (a-b) sin^2(phi),  theta = phi/(|sin phi| sqrt(a-b)).
// theta(phi) decreases on a Maximum sub-branch and increases on a Minimum
// sub-branch; the two meet at phi_k (tan phi_k = phi_k).  Branches depend on
// (a, Delta) only.
struct SaddleBranch {
  int k;
  double phi_lo, phi_hi;
  SubBranch sub;
  double a;
  double Delta;
  double theta_lo, theta_hi;  // image of [phi_lo, phi_hi]; +inf at a Delta=0 end

  double theta_of_phi(double phi) const;
  double x_of_phi(double phi) const;
  bool contains_theta(double theta) const;
  double invert_theta(double theta) const;  // RangeError outside the image
};

// All sub-branches of branch k, Maximum first when it exists.  DomainError if
// a <= (1+Delta^2)/2.  theta(phi) monotonicity is verified on a 1e3-point grid
// at construction.
std::vector<SaddleBranch> build_branch(const ModelParams& params, int k);

inline constexpr int kBranchCap = 32;

// ===== branch potentials and crossings =====

struct BranchPoint {
  double phi;
  double x_star;
  double V0_value;
  int curvature_sign;  // +1 Minimum, -1 Maximum
};

// Inverts theta on the sub-branch and evaluates V0 there through the phi-form
//   V0 = -(2/theta^2) int_{theta|Delta|}^{phi} phi' ln[(n_b + a q)/(1+n_b + b q)] dphi',
//   q(phi', theta) = theta^2 sin^2(phi')/phi'^2.
BranchPoint branch_potential(double theta, const SaddleBranch& branch, const ModelParams& params,
                             double quad_tol = 1e-10);

// theta*_{k,k+1} where the two Minimum sub-branch potentials are equal, and
// theta*_{tk} where branch k's minimum potential crosses the thermal level
// V0 = 0.  NoCrossingError when no sign change exists on the image overlap.
double branch_crossing(const ModelParams& params, int k, double tol = 1e-9);
double thermal_crossing(const ModelParams& params, int k, double tol = 1e-9);

// ===== global phase =====

struct PhasePoint {
  int k = -1;  // -1 = thermal, else maser branch index
  double x_mean = 0.0;
  double V0_min = 0.0;
  bool thermal() const { return k < 0; }
};

// Global minimum of V0 among x = 0 and every branch minimum whose image
// contains theta.  Ties within 1e-12 go to thermal, then to the lower k.
PhasePoint global_phase(const ModelParams& params, double quad_tol = 1e-10);

// ===== critical ladder =====

struct CriticalSet {
  double theta0_star;
  std::vector<double> theta_k;           // [k] for k = 1..k_max (index 0 unused = 0)
  std::map<int, double> theta_cross;     // k -> theta*_{k,k+1}
  std::map<int, double> theta_thermal;   // k -> theta*_{tk}, recorded when the
                                         // (k-1,k) pair is thermally separated
};

CriticalSet critical_set(const ModelParams& params, int k_max = 4, double tol = 1e-9);

}  // namespace maser
