#include "maserphase/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "maserphase/distribution.hpp"
#include "maserphase/quadrature.hpp"
#include "maserphase/rootfind.hpp"

namespace maser {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double ab_gap(const ModelParams& p) { return p.a - p.b(); }

// zeros of q(nu) in (0, x): nu_m = (m pi / theta)^2 - Delta^2
std::vector<double> q_zeros(double x, double theta, double delta) {
  std::vector<double> z;
  if (theta <= 0.0) return z;
  const double d2 = delta * delta;
  for (long m = 1;; ++m) {
    const double r = static_cast<double>(m) * kPi / theta;
    const double nu = r * r - d2;
    if (nu >= x) break;
    if (nu > 0.0) z.push_back(nu);
  }
  return z;
}

void require_nondegenerate(const ModelParams& p) {
  if (p.n_b == 0.0 && (p.a == 0.0 || p.theta == 0.0))
    throw DomainError("potential diverges: no gain and no thermal photons");
}

// sin(phi)/phi, stable near 0
double sinc(double phi) {
  if (std::abs(phi) < 1e-8) return 1.0 - phi * phi / 6.0;
  return std::sin(phi) / phi;
}

}  // namespace

double w_of_x(double x, const ModelParams& p) {
  if (x < 0.0) throw DomainError("w_of_x: x must be >= 0");
  const double a = p.a, b = p.b(), nb = p.n_b;
  if (x == 0.0) {
    const double te2 = p.theta_eff_sq();
    return (nb + a * te2) / (1.0 + nb + b * te2);
  }
  const double q = q_of_x(x, p.theta, p.Delta);
  return (nb * x + a * q) / ((1.0 + nb) * x + b * q);
}

double V0(double x, const ModelParams& p, double quad_tol) {
  p.validate();
  require_nondegenerate(p);
  if (x < 0.0) throw DomainError("V0: x must be >= 0");
  if (x == 0.0) return 0.0;
  const bool sing = (p.n_b == 0.0);
  const bool lo_sing = sing && (w_of_x(0.0, p) == 0.0);
  auto f = [&](double nu) { return -std::log(w_of_x(nu, p)); };
  return integrate_split(f, 0.0, x, q_zeros(x, p.theta, p.Delta), sing, lo_sing, 0.0,
                         {quad_tol});
}

double Vk_correction(double x, const ModelParams& p, int k, double quad_tol) {
  p.validate();
  require_nondegenerate(p);
  if (k == 0 || std::abs(k) > kBranchCap)
    throw DomainError("Vk_correction: k must be nonzero with |k| <= 32");
  if (x < 0.0) throw DomainError("Vk_correction: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double omega = 2.0 * kPi * p.N * std::abs(k);
  const double cycles = p.N * std::abs(k);
  const bool sing = (p.n_b == 0.0);
  const bool lo_sing = sing && (w_of_x(0.0, p) == 0.0);
  auto f = [&](double nu) { return -std::log(w_of_x(nu, p)) * std::cos(omega * nu); };
  return integrate_split(f, 0.0, x, q_zeros(x, p.theta, p.Delta), sing, lo_sing, cycles,
                         {quad_tol});
}

std::vector<double> asymptotic_p(const ModelParams& p, int K, const std::vector<double>& grid,
                                 double quad_tol) {
  p.validate();
  require_nondegenerate(p);
  if (K < 0 || K > kBranchCap) throw DomainError("asymptotic_p: K must lie in [0, 32]");
  if (grid.size() < 2) throw DomainError("asymptotic_p: grid needs at least 2 points");
  if (grid.front() < 0.0) throw DomainError("asymptotic_p: grid must be nonnegative");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw DomainError("asymptotic_p: grid must be ascending");

  const bool sing = (p.n_b == 0.0);
  const bool w0_zero = (w_of_x(0.0, p) == 0.0);
  const double total_len = std::max(grid.back(), 1e-300);

  // prefix integrals of -ln w and -ln w * cos(2 pi N k nu) from 0
  const std::size_t n = grid.size();
  std::vector<double> V(n, 0.0);
  std::vector<std::vector<double>> Vk(K, std::vector<double>(n, 0.0));
  auto f0 = [&](double nu) { return -std::log(w_of_x(nu, p)); };
  double x_prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid[i];
    const double base = (i == 0) ? 0.0 : V[i - 1];
    if (x > x_prev) {
      const auto zeros = q_zeros(x, p.theta, p.Delta);
      const double tol_i = std::max(quad_tol * (x - x_prev) / total_len, 1e-15);
      const bool lo_s = sing && (x_prev == 0.0) && w0_zero;
      V[i] = base + integrate_split(f0, x_prev, x, zeros, sing, lo_s, 0.0, {tol_i});
      for (int k = 1; k <= K; ++k) {
        const double omega = 2.0 * kPi * p.N * k;
        auto fk = [&](double nu) { return -std::log(w_of_x(nu, p)) * std::cos(omega * nu); };
        Vk[k - 1][i] = (i == 0 ? 0.0 : Vk[k - 1][i - 1]) +
                       integrate_split(fk, x_prev, x, zeros, sing, lo_s, p.N * k, {tol_i});
      }
    } else {
      V[i] = base;
      for (int k = 1; k <= K; ++k) Vk[k - 1][i] = (i == 0 ? 0.0 : Vk[k - 1][i - 1]);
    }
    x_prev = x;
  }

  // log p up to the common normalization; the 1/sqrt(w(0)) factor is absorbed
  std::vector<double> logp(n);
  for (std::size_t i = 0; i < n; ++i) {
    double Vsum = V[i];
    for (int k = 1; k <= K; ++k) Vsum += 2.0 * Vk[k - 1][i];
    const double w = w_of_x(grid[i], p);
    logp[i] = (w > 0.0 ? 0.5 * std::log(w) : -kInf) - p.N * Vsum;
  }
  double peak = -kInf;
  for (double v : logp) peak = std::max(peak, v);
  if (!std::isfinite(peak)) throw DomainError("asymptotic_p: density vanished on the whole grid");
  double z = 0.0;
  for (double v : logp) z += std::exp(v - peak);
  const double dx = (grid.back() - grid.front()) / static_cast<double>(n - 1);
  const double logz = peak + std::log(z) + std::log(std::max(p.N, 1.0) * dx);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(logp[i] - logz);
  return out;
}

// ===== saddle branches =====

double critical_phi(int k, double tol) {
  if (k < 1) throw DomainError("critical_phi: k must be >= 1");
  // same roots as tan(phi) = phi but pole-free on the bracket
  auto g = [](double x) { return std::sin(x) - x * std::cos(x); };
  const double lo = k * kPi + 1e-12;
  const double hi = k * kPi + 0.5 * kPi - 1e-12;
  double r = find_root(g, lo, hi, {1e-15, 300});
  for (int it = 0; it < 100; ++it) {
    const double t = std::tan(r);
    const double step = (t - r) / (t * t);
    r -= step;
    // tan' = tan^2 blows up the residual scale, so converge on the step
    if (std::abs(step) <= tol + 8.0 * std::numeric_limits<double>::epsilon() * r) return r;
  }
  throw Error("critical_phi: polish failed to reach tolerance");
}

double theta0_star(const ModelParams& p) {
  p.validate();
  const double ab = ab_gap(p), d2 = p.Delta * p.Delta;
  if (!(ab > d2)) throw DomainError("theta0_star: requires a > (1+Delta^2)/2");
  if (p.Delta == 0.0) return 1.0 / std::sqrt(ab);
  return std::asin(std::abs(p.Delta) / std::sqrt(ab)) / std::abs(p.Delta);
}

double theta_k(const ModelParams& p, int k) {
  p.validate();
  const double ab = ab_gap(p), d2 = p.Delta * p.Delta;
  if (!(ab > d2)) throw DomainError("theta_k: requires a > (1+Delta^2)/2");
  if (k < 1) throw DomainError("theta_k: k must be >= 1");
  const double pk = critical_phi(k);
  return pk / (std::abs(std::sin(pk)) * std::sqrt(ab));
}

double SaddleBranch::theta_of_phi(double phi) const {
  const double g = std::sqrt(2.0 * a - 1.0);
  if (phi == 0.0) return 1.0 / g;
  const double s = std::abs(std::sin(phi));
  if (s == 0.0) return kInf;
  return phi / (s * g);
}

double SaddleBranch::x_of_phi(double phi) const {
  const double s = std::sin(phi);
  return std::max(0.0, (2.0 * a - 1.0) * s * s - Delta * Delta);
}

bool SaddleBranch::contains_theta(double theta) const {
  const double pad = 1e-12 * (1.0 + std::abs(theta));
  return theta >= theta_lo - pad && theta <= theta_hi + pad;
}

double SaddleBranch::invert_theta(double theta) const {
  if (!contains_theta(theta))
    throw RangeError("invert_theta: theta outside the sub-branch image");
  double lo = phi_lo, hi = phi_hi;
  const double nudge = (hi - lo) * 1e-15;
  auto f = [&](double phi) { return theta_of_phi(phi) - theta; };
  // ends where theta diverges (Delta = 0 ends at multiples of pi) are nudged in
  if (!std::isfinite(theta_of_phi(lo))) lo += nudge;
  if (!std::isfinite(theta_of_phi(hi))) hi -= nudge;
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    // round-off at the image edge: theta effectively sits on an endpoint
    return (std::abs(flo) < std::abs(fhi)) ? lo : hi;
  }
  return find_root(f, lo, hi, {1e-14, 300});
}

namespace {

void verify_monotone(const SaddleBranch& br) {
  constexpr int kGrid = 1000;
  const double inset = (br.phi_hi - br.phi_lo) * 1e-12;
  double prev = -kInf;
  for (int i = 0; i <= kGrid; ++i) {
    double phi = br.phi_lo + (br.phi_hi - br.phi_lo) * static_cast<double>(i) / kGrid;
    if (i == 0) phi += inset;
    if (i == kGrid) phi -= inset;
    const double t = br.theta_of_phi(phi);
    const double v = (br.sub == SubBranch::Minimum) ? t : -t;
    if (i > 0 && !(v > prev))
      throw Error("build_branch: theta(phi) not strictly monotone on sub-branch");
    prev = v;
  }
}

SaddleBranch make_sub(const ModelParams& p, int k, double lo, double hi, SubBranch sub) {
  SaddleBranch br{k, lo, hi, sub, p.a, p.Delta, 0.0, 0.0};
  // at Delta = 0 a sub-branch ends on a multiple of pi, where theta diverges;
  // fp sin(m*pi) never vanishes exactly, so detect that end analytically
  auto end_theta = [&](double phi_end) -> double {
    if (p.Delta == 0.0) {
      const long m = std::lround(phi_end / kPi);
      if (m >= 1 && std::abs(phi_end - m * kPi) < 1e-9) return kInf;
    }
    return br.theta_of_phi(phi_end);
  };
  const double t_at_lo = end_theta(lo), t_at_hi = end_theta(hi);
  br.theta_lo = (sub == SubBranch::Minimum) ? t_at_lo : t_at_hi;
  br.theta_hi = (sub == SubBranch::Minimum) ? t_at_hi : t_at_lo;
  verify_monotone(br);
  return br;
}

const SaddleBranch& minimum_sub(const std::vector<SaddleBranch>& subs) {
  return subs.back();  // Maximum, when present, is stored first
}

}  // namespace

std::vector<SaddleBranch> build_branch(const ModelParams& p, int k) {
  p.validate();
  if (k < 0 || k > kBranchCap) throw DomainError("build_branch: branch index out of range");
  const double ab = ab_gap(p), d2 = p.Delta * p.Delta;
  if (!(ab > d2))
    throw DomainError("build_branch: saddle points exist only for a > (1+Delta^2)/2");
  const double phi0 = std::asin(std::min(1.0, std::abs(p.Delta) / std::sqrt(ab)));
  const double lo = phi0 + k * kPi;
  const double hi = (k + 1) * kPi - phi0;
  std::vector<SaddleBranch> subs;
  if (k == 0) {
    subs.push_back(make_sub(p, k, lo, hi, SubBranch::Minimum));
  } else {
    const double pk = critical_phi(k);
    if (pk > lo) {
      subs.push_back(make_sub(p, k, lo, pk, SubBranch::Maximum));
      subs.push_back(make_sub(p, k, pk, hi, SubBranch::Minimum));
    } else {
      // phi0 beyond the fold point: only the rising piece survives
      subs.push_back(make_sub(p, k, lo, hi, SubBranch::Minimum));
    }
  }
  return subs;
}

namespace {

// Eq.-(8) form of V0 with upper limit phi: the substitution phi' =
// theta sqrt(nu + Delta^2) maps [0, x] to [theta|Delta|, phi].
double V0_phi_form(double phi_up, double theta, const ModelParams& p, double quad_tol) {
  require_nondegenerate(p);
  const double a = p.a, b = p.b(), nb = p.n_b;
  const double lo = theta * std::abs(p.Delta);
  if (phi_up < lo - 1e-9 * (1.0 + lo))
    throw DomainError("V0_phi_form: upper limit below theta|Delta|");
  if (phi_up <= lo) return 0.0;
  auto f = [&](double phi) {
    const double sc = sinc(phi);
    const double q = theta * theta * sc * sc;
    return phi * std::log((nb + a * q) / (1.0 + nb + b * q));
  };
  std::vector<double> bps;
  for (long m = 1; m * kPi < phi_up; ++m)
    if (m * kPi > lo) bps.push_back(m * kPi);
  const bool sing = (nb == 0.0);
  const double inner =
      integrate_split(f, lo, phi_up, bps, sing, false, 0.0, {0.5 * quad_tol * theta * theta});
  return -2.0 / (theta * theta) * inner;
}

}  // namespace

BranchPoint branch_potential(double theta, const SaddleBranch& branch, const ModelParams& p,
                             double quad_tol) {
  p.validate();
  if (std::abs(branch.a - p.a) > 1e-12 || std::abs(branch.Delta - p.Delta) > 1e-12)
    throw DomainError("branch_potential: branch was built for different (a, Delta)");
  const double phi = branch.invert_theta(theta);
  BranchPoint bp;
  bp.phi = phi;
  bp.x_star = branch.x_of_phi(phi);
  bp.V0_value = V0_phi_form(phi, theta, p, quad_tol);
  bp.curvature_sign = (branch.sub == SubBranch::Minimum) ? 1 : -1;
  return bp;
}

namespace {

// theta scan grid across an image overlap: uniform plus extra points packed
// toward the upper end, where crossings migrate as the phases separate
std::vector<double> crossing_scan_grid(double lo, double hi) {
  std::vector<double> ts;
  const int n = 257;
  for (int i = 0; i <= n; ++i) ts.push_back(lo + (hi - lo) * static_cast<double>(i) / n);
  for (int j = 2; j <= 5; ++j) ts.push_back(hi - (hi - lo) * std::pow(10.0, -j));
  std::sort(ts.begin(), ts.end());
  return ts;
}

double scan_root_over(const std::function<double(double)>& f, const std::vector<double>& ts,
                      double tol) {
  double x_prev = 0.0, f_prev = 0.0;
  bool have_prev = false;
  for (double t : ts) {
    const double ft = f(t);
    if (ft == 0.0) return t;
    if (have_prev && (f_prev > 0.0) != (ft > 0.0))
      return find_root(f, x_prev, t, {tol, 200});
    x_prev = t;
    f_prev = ft;
    have_prev = true;
  }
  throw NoCrossingError("no sign change over the scanned theta range");
}

double capped_hi(const SaddleBranch& sub, double lo_overlap, double ab) {
  if (std::isfinite(sub.theta_hi)) return sub.theta_hi;
  return 3.0 * lo_overlap + 20.0 / std::sqrt(ab);
}

}  // namespace

double branch_crossing(const ModelParams& p, int k, double tol) {
  p.validate();
  if (k < 0 || k + 1 > kBranchCap) throw DomainError("branch_crossing: branch index out of range");
  const SaddleBranch bk = minimum_sub(build_branch(p, k));
  const SaddleBranch bk1 = minimum_sub(build_branch(p, k + 1));
  const double lo = std::max(bk.theta_lo, bk1.theta_lo);
  double hi = std::min(capped_hi(bk, lo, ab_gap(p)), capped_hi(bk1, lo, ab_gap(p)));
  if (!(lo < hi)) throw NoCrossingError("branch_crossing: images do not overlap");
  auto f = [&](double theta) {
    return branch_potential(theta, bk, p).V0_value - branch_potential(theta, bk1, p).V0_value;
  };
  try {
    return scan_root_over(f, crossing_scan_grid(lo, hi), tol);
  } catch (const NoCrossingError&) {
    throw NoCrossingError("branch_crossing: minima of branches " + std::to_string(k) + " and " +
                          std::to_string(k + 1) + " do not intersect");
  }
}

double thermal_crossing(const ModelParams& p, int k, double tol) {
  p.validate();
  if (k < 0 || k > kBranchCap) throw DomainError("thermal_crossing: branch index out of range");
  const SaddleBranch bk = minimum_sub(build_branch(p, k));
  const double lo = bk.theta_lo;
  double hi = capped_hi(bk, lo, ab_gap(p));
  // exclude the death point, where V0 -> 0 trivially as x* -> 0
  if (std::isfinite(bk.theta_hi)) hi -= (hi - lo) * 1e-3;
  auto f = [&](double theta) { return branch_potential(theta, bk, p).V0_value; };
  try {
    return scan_root_over(f, crossing_scan_grid(lo, hi), tol);
  } catch (const NoCrossingError&) {
    throw NoCrossingError("thermal_crossing: branch " + std::to_string(k) +
                          " minimum does not cross the thermal level");
  }
}

PhasePoint global_phase(const ModelParams& p, double quad_tol) {
  p.validate();
  PhasePoint best;  // thermal reference: V0 = 0 at x = 0
  if (!(ab_gap(p) > p.Delta * p.Delta)) return best;
  for (int k = 0; k <= kBranchCap; ++k) {
    const SaddleBranch mn = minimum_sub(build_branch(p, k));
    if (p.theta < mn.theta_lo) break;  // birth thetas increase with k
    if (!mn.contains_theta(p.theta)) continue;
    const BranchPoint bp = branch_potential(p.theta, mn, p, quad_tol);
    if (bp.V0_value < best.V0_min - 1e-12) {
      best.k = k;
      best.x_mean = bp.x_star;
      best.V0_min = bp.V0_value;
    }
  }
  return best;
}

CriticalSet critical_set(const ModelParams& p, int k_max, double tol) {
  p.validate();
  if (k_max < 1 || k_max > kBranchCap) throw DomainError("critical_set: k_max out of range");
  CriticalSet cs;
  cs.theta0_star = theta0_star(p);
  cs.theta_k.assign(k_max + 1, 0.0);
  for (int k = 1; k <= k_max; ++k) cs.theta_k[k] = theta_k(p, k);
  for (int k = 0; k < k_max; ++k) {
    try {
      cs.theta_cross[k] = branch_crossing(p, k, tol);
    } catch (const NoCrossingError&) {
      try {
        cs.theta_thermal[k + 1] = thermal_crossing(p, k + 1, tol);
      } catch (const NoCrossingError&) {
      }
    }
  }
  return cs;
}

}  // namespace maser
