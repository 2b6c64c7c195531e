#pragma once

#include <cmath>

#include "maserphase/errors.hpp"

namespace maser {

// Dimensionless parameter bundle of the pumped cavity.
//   N     atomic flux per cavity lifetime, N = R/gamma
//   a     excited-state probability of the injected atoms; b = 1 - a derived
//   n_b   mean thermal photon number of the reservoir
//   Delta detuning Delta = dOmega/(2 g sqrt(N))
//   theta pump parameter theta = g tau sqrt(N)
struct ModelParams {
  double N = 100.0;
  double a = 1.0;
  double n_b = 0.0;
  double Delta = 0.0;
  double theta = 1.0;

  double b() const { return 1.0 - a; }

  // sin^2(theta*Delta)/Delta^2, continued through Delta = 0 where it is theta^2
  double theta_eff_sq() const {
    if (Delta == 0.0) return theta * theta;
    const double s = std::sin(theta * Delta);
    return s * s / (Delta * Delta);
  }

  void validate() const {
    if (!(N >= 0.0) || !std::isfinite(N)) throw DomainError("N must be finite and >= 0");
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("a must lie in [0,1]");
    if (!(n_b >= 0.0) || !std::isfinite(n_b)) throw DomainError("n_b must be finite and >= 0");
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw DomainError("theta must be finite and >= 0");
    if (!std::isfinite(Delta)) throw DomainError("Delta must be finite");
  }
};

// Reduction of raw experimental quantities to the dimensionless bundle.
inline ModelParams params_from_raw(double R, double gamma, double g, double tau,
                                   double delta_omega, double a, double n_b) {
  if (!(R > 0.0) || !(gamma > 0.0) || !(g > 0.0) || !(tau > 0.0))
    throw DomainError("raw inputs R, gamma, g, tau must be positive");
  ModelParams p;
  p.N = R / gamma;
  p.a = a;
  p.n_b = n_b;
  p.theta = g * tau * std::sqrt(p.N);
  p.Delta = delta_omega / (2.0 * g * std::sqrt(p.N));
  p.validate();
  return p;
}

}  // namespace maser
