#include "maserphase/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "maserphase/errors.hpp"
#include "maserphase/tridiag.hpp"

namespace maser {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rates {
  std::vector<double> up;    // up[n]: n -> n+1, n = 0..n_max-1
  std::vector<double> down;  // down[n]: n -> n-1, down[0] = 0
};

Rates rates_of(const GeneratorMatrix& gen) {
  Rates r;
  r.up.resize(gen.n_max);
  r.down.assign(gen.n_max + 1, 0.0);
  for (std::int64_t n = 0; n < gen.n_max; ++n) {
    r.up[n] = -gen.sub[n];
    r.down[n + 1] = -gen.super[n];
  }
  return r;
}

struct ChainState {
  std::vector<double> logp;  // normalized; -inf past a trapping split
  std::int64_t head;         // states reachable from n = 0
  bool split;
};

ChainState stationary_on_chain(const Rates& r) {
  const std::int64_t links = static_cast<std::int64_t>(r.up.size());
  ChainState st;
  st.logp.assign(links + 1, -kInf);
  st.head = links + 1;
  st.split = false;
  st.logp[0] = 0.0;
  for (std::int64_t n = 0; n < links; ++n) {
    if (r.up[n] == 0.0) {
      st.head = n + 1;
      st.split = true;
      break;
    }
    st.logp[n + 1] = st.logp[n] + std::log(r.up[n]) - std::log(r.down[n + 1]);
  }
  double peak = -kInf;
  for (std::int64_t n = 0; n < st.head; ++n) peak = std::max(peak, st.logp[n]);
  double sum = 0.0;
  for (std::int64_t n = 0; n < st.head; ++n) sum += std::exp(st.logp[n] - peak);
  const double logz = peak + std::log(sum);
  for (std::int64_t n = 0; n < st.head; ++n) st.logp[n] -= logz;
  return st;
}

// Symmetrized form of L restricted to rows [0, h): same spectrum, built from
// the rates alone so no stationary weight is ever exponentiated.
void symmetric_block(const GeneratorMatrix& gen, const Rates& r,
                     std::int64_t h, std::vector<double>& sdiag,
                     std::vector<double>& soff) {
  sdiag.assign(gen.diag.begin(), gen.diag.begin() + h);
  soff.resize(h - 1);
  for (std::int64_t n = 0; n + 1 < h; ++n)
    soff[n] = std::sqrt(r.up[n] * r.down[n + 1]);
}

}  // namespace

GeneratorMatrix build_generator(const ModelParams& params, std::int64_t n_max) {
  params.validate();
  if (n_max < 10) throw DomainError("build_generator: n_max must be >= 10");
  const double N = params.N, a = params.a, b = params.b(), nb = params.n_b;

  GeneratorMatrix gen;
  gen.n_max = n_max;
  gen.params = params;
  gen.diag.assign(n_max + 1, 0.0);
  gen.super.assign(n_max, 0.0);
  gen.sub.assign(n_max, 0.0);

  std::vector<double> q(n_max + 1, 0.0);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (N > 0.0) {
      const double x = static_cast<double>(n) / N;
      q[n] = q_is_trapping_zero(x, params.theta, params.Delta)
                 ? 0.0
                 : q_of_x(x, params.theta, params.Delta);
    }
  }

  for (std::int64_t n = 0; n <= n_max; ++n) {
    const double up = n < n_max ? nb * (n + 1) + N * a * q[n + 1] : 0.0;
    const double down = (1.0 + nb) * n + N * b * q[n];
    gen.diag[n] = up + down;
    if (n < n_max) gen.sub[n] = -up;
    if (n > 0) gen.super[n - 1] = -down;
  }
  return gen;
}

SpectralResult spectral_gap(const GeneratorMatrix& gen) {
  if (gen.n_max < 10) throw DomainError("spectral_gap: generator too small");
  const Rates r = rates_of(gen);
  const ChainState st = stationary_on_chain(r);

  std::vector<double> p(gen.n_max + 1, 0.0);
  for (std::int64_t n = 0; n < st.head; ++n) p[n] = std::exp(st.logp[n]);

  double residual = 0.0;
  for (std::int64_t n = 0; n <= gen.n_max; ++n) {
    double row = gen.diag[n] * p[n];
    if (n > 0) row += gen.sub[n - 1] * p[n - 1];
    if (n < gen.n_max) row += gen.super[n] * p[n + 1];
    residual = std::max(residual, std::abs(row));
  }

  // a single-state head leaves no gap to measure there; fall back to the
  // slowest relaxation of the whole (block-triangular) chain
  const std::int64_t h = st.head >= 2 ? st.head : gen.n_max + 1;
  std::vector<double> sdiag, soff;
  symmetric_block(gen, r, h, sdiag, soff);
  const std::vector<double> eig = smallest_eigenvalues(sdiag, soff, 2);

  SpectralResult res;
  res.lambda0_residual = residual;
  res.gap = eig[1];
  if (!(res.gap > 0.0))
    throw Error("spectral_gap: nonpositive gap at bisection resolution");
  res.xi = 1.0 / res.gap;
  res.n_max_used = gen.n_max;
  res.chain_split = st.split;
  res.head_size = h;
  return res;
}

SpectralResult correlation_length(const ModelParams& params,
                                  const DistributionOptions& opt) {
  const PhotonDistribution dist = stationary_distribution(params, opt);
  const std::int64_t n_max = std::max<std::int64_t>(dist.n_max, 10);
  return spectral_gap(build_generator(params, n_max));
}

double thermal_xi_approx(const ModelParams& params) {
  params.validate();
  const double gap_ab = params.a - params.b();
  const double te2 = params.theta_eff_sq();
  if (te2 * gap_ab >= 1.0)
    throw DomainError("thermal_xi_approx: outside the normalizable regime");
  return 1.0 / (1.0 + gap_ab * te2);
}

double critical_xi_approx(const ModelParams& params, double N) {
  params.validate();
  const double gap_ab = params.a - params.b();
  if (!(gap_ab > 0.0))
    throw DomainError("critical_xi_approx: requires a > 1/2");
  if (!(N >= 0.0) || !std::isfinite(N))
    throw DomainError("critical_xi_approx: bad N");
  return 0.5 * gap_ab * std::sqrt(N / (params.a + gap_ab * params.n_b));
}

AutocorrResult photon_autocorrelation(const ModelParams& params,
                                      const std::vector<double>& t_grid,
                                      std::int64_t n_max) {
  params.validate();
  if (t_grid.empty() || !(t_grid.front() > 0.0))
    throw DomainError("photon_autocorrelation: t_grid must be positive");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw DomainError("photon_autocorrelation: t_grid must increase");

  const GeneratorMatrix gen = build_generator(params, n_max);
  const Rates r = rates_of(gen);
  const ChainState st = stationary_on_chain(r);
  const std::int64_t h = st.head;
  if (h < 2)
    throw DomainError(
        "photon_autocorrelation: stationary state is a single trapped state");

  double mean = 0.0;
  for (std::int64_t n = 0; n < h; ++n)
    mean += static_cast<double>(n) * std::exp(st.logp[n]);

  // deviation observable folded into the symmetrized frame
  std::vector<double> y(h);
  double var = 0.0;
  for (std::int64_t n = 0; n < h; ++n) {
    y[n] = (static_cast<double>(n) - mean) * std::exp(0.5 * st.logp[n]);
    var += y[n] * y[n];
  }
  if (!(var > 0.0))
    throw DomainError("photon_autocorrelation: zero photon-number variance");

  std::vector<double> sdiag, soff;
  symmetric_block(gen, r, h, sdiag, soff);

  AutocorrResult out;
  out.C.resize(t_grid.size());

  if (h <= 500) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(h, h);
    for (std::int64_t n = 0; n < h; ++n) {
      S(n, n) = sdiag[n];
      if (n + 1 < h) S(n, n + 1) = S(n + 1, n) = -soff[n];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success)
      throw Error("photon_autocorrelation: eigensolver failed");
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), h);
    Eigen::VectorXd c = es.eigenvectors().transpose() * yv;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      double acc = 0.0;
      for (std::int64_t j = 0; j < h; ++j)
        acc += c[j] * c[j] * std::exp(-es.eigenvalues()[j] * t_grid[i]);
      out.C[i] = acc / var;
    }
  } else {
    double lam_max = 0.0;
    for (std::int64_t n = 0; n < h; ++n) {
      double row = sdiag[n];
      if (n > 0) row += soff[n - 1];
      if (n + 1 < h) row += soff[n];
      lam_max = std::max(lam_max, row);
    }
    const double dt_max = 0.1 / std::max(lam_max, 1e-300);
    std::vector<double> lower(h - 1), diag_m(h), upper(h - 1), rhs(h);
    std::vector<double> u(y);
    double t_prev = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      const double span = t_grid[i] - t_prev;
      const auto steps =
          std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / dt_max)));
      const double dt = span / static_cast<double>(steps);
      for (std::int64_t n = 0; n < h; ++n) diag_m[n] = 1.0 + 0.5 * dt * sdiag[n];
      for (std::int64_t n = 0; n + 1 < h; ++n)
        lower[n] = upper[n] = -0.5 * dt * soff[n];
      for (std::int64_t s = 0; s < steps; ++s) {
        // Crank-Nicolson: (I + dt/2 S) u' = (I - dt/2 S) u
        for (std::int64_t n = 0; n < h; ++n) {
          double v = (1.0 - 0.5 * dt * sdiag[n]) * u[n];
          if (n > 0) v += 0.5 * dt * soff[n - 1] * u[n - 1];
          if (n + 1 < h) v += 0.5 * dt * soff[n] * u[n + 1];
          rhs[n] = v;
        }
        u = solve_tridiagonal(lower, diag_m, upper, rhs);
      }
      double acc = 0.0;
      for (std::int64_t n = 0; n < h; ++n) acc += y[n] * u[n];
      out.C[i] = acc / var;
      t_prev = t_grid[i];
    }
  }

  const double c_end = out.C.back();
  if (!(c_end > 0.0) || c_end > 0.1)
    throw FitError("photon_autocorrelation: tail spans less than one decade");
  double st_ = 0.0, sc = 0.0, stt = 0.0, stc = 0.0;
  std::int64_t cnt = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(out.C[i] > 0.0) || out.C[i] > 10.0 * c_end) continue;
    const double lc = std::log(out.C[i]);
    st_ += t_grid[i];
    sc += lc;
    stt += t_grid[i] * t_grid[i];
    stc += t_grid[i] * lc;
    ++cnt;
  }
  if (cnt < 3)
    throw FitError("photon_autocorrelation: too few points in the last decade");
  const double det = cnt * stt - st_ * st_;
  const double slope = (cnt * stc - st_ * sc) / det;
  if (!(slope < 0.0))
    throw FitError("photon_autocorrelation: tail is not decaying");
  out.xi_C = -1.0 / slope;
  return out;
}

}  // namespace maser
