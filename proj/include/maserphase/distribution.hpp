#pragma once

#include <cstdint>
#include <vector>

#include "maserphase/params.hpp"

namespace maser {

// ===== pumping function =====

// q(x) = x/(x+Delta^2) * sin^2(theta*sqrt(x+Delta^2)), Eq. of the emission
// probability after one atom transit.  Delta = 0 is an exact branch,
// q = sin^2(theta*sqrt(x)).  Always in [0,1].
double q_of_x(double x, double theta, double delta);

// True when x sits on a trapping zero of q.  fp sin never vanishes exactly at
// a nonzero multiple of pi, so arguments within a few ulps of one are taken as
// the exact zeros they represent; q there is below 1e-24, dynamically nil.
bool q_is_trapping_zero(double x, double theta, double delta);

// ===== stationary distribution =====

struct PhotonDistribution {
  std::vector<double> probs;  // p_0 .. p_{n_max}, sums to 1
  std::int64_t n_max = 0;
  double log_p0 = 0.0;
  ModelParams params;

  double mean() const;
  double mean_x() const;  // <n>/N
  double variance() const;
};

struct DistributionOptions {
  double tail_tol = 1e-12;          // tail criterion p_nmax < tail_tol * max p
  std::int64_t hard_cap = 1000000;  // expansion limit before TruncationError
};

// Exact stationary p_n from the detailed-balance product, accumulated in log
// space and normalized by log-sum-exp.  n_max grows adaptively until the tail
// criterion holds.  A zero factor (n_b = 0 at a trapping zero of q) truncates
// the distribution exactly; that is physics, not an error.
PhotonDistribution stationary_distribution(const ModelParams& params,
                                           const DistributionOptions& opt = {});

// Raw moment sum_n n^k p_n.
double moments(const PhotonDistribution& dist, int order);

// Thermal-phase closed form: geometric with ratio
// (n_b + a*theta_eff^2)/(1 + n_b + b*theta_eff^2).  Throws
// NormalizabilityError once theta_eff^2 (a-b) >= 1.
struct ThermalClosedForm {
  double ratio;
  double mean;
};
ThermalClosedForm thermal_closed_form(const ModelParams& params);

// Materialized geometric distribution for the thermal phase (same truncation
// conventions as stationary_distribution).
PhotonDistribution thermal_distribution(const ModelParams& params,
                                        const DistributionOptions& opt = {});

// ===== twinkling =====

// Periodic extrema of <n> along theta in the always-thermal regime
// a < (1+Delta^2)/2, Delta != 0.  Maxima at Delta*theta = (n+1/2)pi, minima
// (<n> = n_b) at Delta*theta = n*pi.
struct TwinkleExtrema {
  double mean_max;
  double mean_min;
  std::vector<double> theta_max_positions;
  std::vector<double> theta_min_positions;
};
TwinkleExtrema twinkle_extrema(const ModelParams& params, int n_requested = 4);

}  // namespace maser
