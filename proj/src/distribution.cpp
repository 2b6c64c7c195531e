#include "maserphase/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace maser {

double q_of_x(double x, double theta, double delta) {
  if (x < 0.0) throw DomainError("q_of_x: x must be >= 0");
  if (delta == 0.0) {
    if (x == 0.0) return 0.0;
    const double s = std::sin(theta * std::sqrt(x));
    return s * s;
  }
  const double d2 = delta * delta;
  const double s = std::sin(theta * std::sqrt(x + d2));
  return x / (x + d2) * s * s;
}

bool q_is_trapping_zero(double x, double theta, double delta) {
  if (x < 0.0) throw DomainError("q_is_trapping_zero: x must be >= 0");
  if (x == 0.0 || theta == 0.0) return true;
  const double z = theta * std::sqrt(x + delta * delta);
  const double slack = 64.0 * std::numeric_limits<double>::epsilon();
  return std::abs(std::sin(z)) < slack * std::max(1.0, z);
}

namespace {

// max-shifted log-sum-exp over the first n entries
double log_sum_exp(const std::vector<double>& v, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, v[i]);
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(v[i] - m);
  return m + std::log(sum);
}

}  // namespace

PhotonDistribution stationary_distribution(const ModelParams& params,
                                           const DistributionOptions& opt) {
  params.validate();
  if (!(opt.tail_tol > 0.0 && opt.tail_tol <= 1e-6))
    throw DomainError("stationary_distribution: tail_tol must lie in (0, 1e-6]");

  const double N = params.N, a = params.a, b = params.b(), nb = params.n_b;
  const double log_tail = std::log(opt.tail_tol);

  // cumulative log of the detailed-balance product, s[0] = 0
  std::vector<double> s{0.0};
  std::int64_t cut = -1;  // first n with an exactly zero factor, if any

  std::int64_t n_max = static_cast<std::int64_t>(
      std::ceil(N * std::max(0.0, a - b) + 10.0 * std::sqrt(std::max(N, 1.0)) + 50.0));
  n_max = std::min(n_max, opt.hard_cap);

  auto extend_to = [&](std::int64_t target) {
    for (std::int64_t m = static_cast<std::int64_t>(s.size()); m <= target; ++m) {
      if (cut >= 0) break;
      const double x_m = (N > 0.0) ? static_cast<double>(m) / N : 0.0;
      const double qm = (N > 0.0) ? q_of_x(x_m, params.theta, params.Delta) : 0.0;
      const double num = nb * m + N * a * qm;
      const double den = (1.0 + nb) * m + N * b * qm;
      if (nb == 0.0 &&
          (num == 0.0 || q_is_trapping_zero(x_m, params.theta, params.Delta))) {
        cut = m;  // trapping: every p_n with n >= m vanishes exactly
        break;
      }
      s.push_back(s.back() + std::log(num) - std::log(den));
    }
  };

  for (;;) {
    extend_to(n_max);
    if (cut >= 0) break;
    const double peak = *std::max_element(s.begin(), s.end());
    if (s.back() < log_tail + peak) break;
    if (n_max >= opt.hard_cap)
      throw TruncationError("stationary_distribution: tail criterion unmet at hard cap");
    n_max = std::min(opt.hard_cap, n_max * 2);
  }

  PhotonDistribution dist;
  dist.params = params;
  if (cut >= 0) {
    // keep the zero slot at the cut so the stored vector shows the truncation
    dist.n_max = cut;
    const double logz = log_sum_exp(s, s.size());
    dist.log_p0 = -logz;
    dist.probs.resize(cut + 1, 0.0);
    for (std::int64_t n = 0; n < cut; ++n) dist.probs[n] = std::exp(s[n] - logz);
  } else {
    dist.n_max = static_cast<std::int64_t>(s.size()) - 1;
    const double logz = log_sum_exp(s, s.size());
    dist.log_p0 = -logz;
    dist.probs.resize(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) dist.probs[n] = std::exp(s[n] - logz);
  }
  return dist;
}

double moments(const PhotonDistribution& dist, int order) {
  if (order < 0) throw DomainError("moments: order must be >= 0");
  long double acc = 0.0L;
  for (std::size_t n = 0; n < dist.probs.size(); ++n) {
    long double t = dist.probs[n];
    for (int k = 0; k < order; ++k) t *= static_cast<long double>(n);
    acc += t;
  }
  return static_cast<double>(acc);
}

double PhotonDistribution::mean() const { return moments(*this, 1); }

double PhotonDistribution::mean_x() const {
  if (params.N == 0.0) return 0.0;
  return mean() / params.N;
}

double PhotonDistribution::variance() const {
  const double m1 = moments(*this, 1);
  return moments(*this, 2) - m1 * m1;
}

ThermalClosedForm thermal_closed_form(const ModelParams& params) {
  params.validate();
  const double te2 = params.theta_eff_sq();
  const double a = params.a, b = params.b(), nb = params.n_b;
  if (te2 * (a - b) >= 1.0)
    throw NormalizabilityError("thermal_closed_form: theta_eff^2 (a-b) >= 1");
  const double ratio = (nb + a * te2) / (1.0 + nb + b * te2);
  return {ratio, ratio / (1.0 - ratio)};
}

PhotonDistribution thermal_distribution(const ModelParams& params,
                                        const DistributionOptions& opt) {
  const ThermalClosedForm cf = thermal_closed_form(params);
  PhotonDistribution dist;
  dist.params = params;
  if (cf.ratio == 0.0) {
    dist.probs = {1.0};
    dist.n_max = 0;
    dist.log_p0 = 0.0;
    return dist;
  }
  std::int64_t n_max =
      static_cast<std::int64_t>(std::ceil(std::log(opt.tail_tol) / std::log(cf.ratio))) + 1;
  if (n_max > opt.hard_cap)
    throw TruncationError("thermal_distribution: geometric tail exceeds hard cap");
  dist.n_max = n_max;
  dist.probs.resize(n_max + 1);
  const double lr = std::log(cf.ratio);
  double z = 0.0;
  for (std::int64_t n = 0; n <= n_max; ++n) z += (dist.probs[n] = std::exp(n * lr));
  for (auto& p : dist.probs) p /= z;
  dist.log_p0 = std::log(dist.probs[0]);
  return dist;
}

TwinkleExtrema twinkle_extrema(const ModelParams& params, int n_requested) {
  params.validate();
  if (params.Delta == 0.0)
    throw DomainError("twinkle_extrema: requires Delta != 0");
  const double d2 = params.Delta * params.Delta;
  if (!(params.a < 0.5 * (1.0 + d2)))
    throw DomainError("twinkle_extrema: maser branches exist for a >= (1+Delta^2)/2");
  const double a = params.a, b = params.b(), nb = params.n_b;
  TwinkleExtrema ext;
  ext.mean_max = (nb + a / d2) / (1.0 + (b - a) / d2);
  ext.mean_min = nb;
  const double ad = std::abs(params.Delta);
  for (int n = 0; n <= n_requested; ++n) {
    ext.theta_max_positions.push_back((n + 0.5) * std::numbers::pi / ad);
    ext.theta_min_positions.push_back(n * std::numbers::pi / ad);
  }
  return ext;
}

}  // namespace maser
