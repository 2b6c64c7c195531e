#pragma once

#include <cstdint>
#include <vector>

#include "maserphase/distribution.hpp"
#include "maserphase/params.hpp"

namespace maser {

// Tridiagonal generator of dp/dt = -L p (time in units of the cavity
// lifetime): cavity damping plus the per-transit pump map, scaled by N.
struct GeneratorMatrix {
  std::int64_t n_max = 0;
  std::vector<double> diag;   // L_nn, n = 0..n_max
  std::vector<double> super;  // L_{n,n+1}, n = 0..n_max-1 (all <= 0)
  std::vector<double> sub;    // L_{n+1,n}, n = 0..n_max-1 (all <= 0)
  ModelParams params;

  double up_rate(std::int64_t n) const { return -sub[n]; }
  double down_rate(std::int64_t n) const { return -super[n - 1]; }
};

// Assembles the generator with the boundary row closed by dropping the
// outflow to n_max+1; every column then sums to zero exactly.
GeneratorMatrix build_generator(const ModelParams& params, std::int64_t n_max);

struct SpectralResult {
  double lambda0_residual = 0.0;  // ||L p||_inf at the stationary vector
  double gap = 0.0;               // smallest nonzero eigenvalue of L
  double xi = 0.0;                // correlation length, 1/gap
  std::int64_t n_max_used = 0;
  bool chain_split = false;       // an exact trapping zero cut the chain
  std::int64_t head_size = 0;     // states the gap was computed over
};

// Spectral gap through the detailed-balance symmetrization.  The symmetric
// tridiagonal has off-diagonal -sqrt(up_n * down_{n+1}), assembled from the
// rates alone so no stationary weight ever underflows.  With n_b = 0 a
// trapping zero makes an up-rate exactly zero; the gap is then taken on the
// head block that carries the stationary state (or on the full chain when
// that block is a single state).
SpectralResult spectral_gap(const GeneratorMatrix& gen);

// Truncate by the stationary tail criterion, then take the gap.
SpectralResult correlation_length(const ModelParams& params,
                                  const DistributionOptions& opt = {});

// Closed-form thermal-phase estimate 1/(1 + (a-b)*theta_eff^2), meaningful
// away from critical lines; requires normalizability.
double thermal_xi_approx(const ModelParams& params);

// Closed-form peak value on a critical line, (a-b)/2 * sqrt(N/(a+(a-b)n_b)).
double critical_xi_approx(const ModelParams& params, double N);

struct AutocorrResult {
  std::vector<double> C;  // normalized photon-number autocovariance
  double xi_C = 0.0;      // decay length fitted on the last decade
};

// C(t) = (<n(t)n(0)> - <n>^2)/Var(n) on t_grid (positive, increasing),
// by eigen-expansion of the symmetrized generator up to 500 states and an
// implicit stepper beyond.  The tail fit needs at least one decade of decay
// on the grid, else FitError.
AutocorrResult photon_autocorrelation(const ModelParams& params,
                                      const std::vector<double>& t_grid,
                                      std::int64_t n_max);

}  // namespace maser
