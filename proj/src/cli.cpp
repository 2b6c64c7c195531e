#include "maserphase/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "maserphase/distribution.hpp"
#include "maserphase/errors.hpp"
#include "maserphase/parallel.hpp"
#include "maserphase/phase_diagram.hpp"
#include "maserphase/potential.hpp"
#include "maserphase/spectrum.hpp"

namespace maser {

std::string format_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

using nlohmann::json;

const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> m = {
      {"distribution", Command::distribution},
      {"potential", Command::potential},
      {"branches", Command::branches},
      {"phase-diagram", Command::phase_diagram},
      {"corrlength", Command::corrlength},
      {"autocorr", Command::autocorr},
      {"twinkle", Command::twinkle},
  };
  return m;
}

std::string command_name(Command c) {
  for (const auto& [name, cmd] : command_names())
    if (cmd == c) return name;
  return "?";
}

ParamValue parse_param_value(const std::string& flag, const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError(flag + ": not a number: '" + s + "'");
    }
  };
  if (text.find(':') == std::string::npos) return number(text);
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3)
    throw UsageError(flag + ": sweep must be lo:hi:steps, got '" + text + "'");
  SweepSpec sw;
  sw.lo = number(parts[0]);
  sw.hi = number(parts[1]);
  try {
    std::size_t pos = 0;
    sw.steps = std::stoll(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument(parts[2]);
  } catch (const std::exception&) {
    throw UsageError(flag + ": sweep steps must be an integer");
  }
  if (sw.steps < 2) throw UsageError(flag + ": sweep needs steps >= 2");
  if (!(sw.lo < sw.hi)) throw UsageError(flag + ": sweep needs lo < hi");
  return sw;
}

void check_range(const ParamValue& v, const char* flag, double lo, double hi) {
  auto chk = [&](double x) {
    if (!std::isfinite(x) || x < lo || x > hi)
      throw UsageError(std::string(flag) + ": value " + format_g17(x) +
                       " outside [" + format_g17(lo) + ", " + format_g17(hi) + "]");
  };
  if (const double* d = std::get_if<double>(&v)) {
    chk(*d);
  } else {
    const SweepSpec& s = std::get<SweepSpec>(v);
    chk(s.lo);
    chk(s.hi);
  }
}

double require_scalar(const ParamValue& v, const char* flag) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  throw UsageError(std::string(flag) + ": this command takes a scalar, not a sweep");
}

bool is_sweep(const ParamValue& v) { return std::holds_alternative<SweepSpec>(v); }

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MASERPHASE_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
  }
  return hardware_jobs();
}

// ---- sweep engine ----

struct SweepAxis {
  const char* name;  // column header
  int slot;          // 0..4 = N, a, nb, delta, theta
  SweepSpec spec;
};

std::vector<SweepAxis> sweep_axes(const RunConfig& c) {
  std::vector<SweepAxis> axes;
  const ParamValue* vals[5] = {&c.N, &c.a, &c.nb, &c.delta, &c.theta};
  const char* names[5] = {"N", "a", "nb", "delta", "theta"};
  for (int i = 0; i < 5; ++i)
    if (is_sweep(*vals[i])) axes.push_back({names[i], i, std::get<SweepSpec>(*vals[i])});
  return axes;
}

ModelParams base_params(const RunConfig& c) {
  ModelParams p;
  if (const double* d = std::get_if<double>(&c.N)) p.N = *d;
  if (const double* d = std::get_if<double>(&c.a)) p.a = *d;
  if (const double* d = std::get_if<double>(&c.nb)) p.n_b = *d;
  if (const double* d = std::get_if<double>(&c.delta)) p.Delta = *d;
  if (const double* d = std::get_if<double>(&c.theta)) p.theta = *d;
  return p;
}

double axis_value(const SweepSpec& s, std::int64_t i) {
  return s.lo + (s.hi - s.lo) * static_cast<double>(i) / static_cast<double>(s.steps - 1);
}

ModelParams params_at(const ModelParams& base, const std::vector<SweepAxis>& axes,
                      std::int64_t flat) {
  ModelParams p = base;
  for (std::size_t ax = axes.size(); ax-- > 0;) {
    const std::int64_t i = flat % axes[ax].spec.steps;
    flat /= axes[ax].spec.steps;
    const double v = axis_value(axes[ax].spec, i);
    switch (axes[ax].slot) {
      case 0: p.N = v; break;
      case 1: p.a = v; break;
      case 2: p.n_b = v; break;
      case 3: p.Delta = v; break;
      case 4: p.theta = v; break;
    }
  }
  return p;
}

DistributionOptions dist_options(const RunConfig& c) {
  DistributionOptions o;
  if (c.tol) o.tail_tol = *c.tol;
  if (c.nmax) o.hard_cap = *c.nmax;
  return o;
}

std::string order_name(TransitionOrder o) {
  return o == TransitionOrder::First ? "first" : "second";
}

// all five parameters, so sweep rows are self-describing
void push_param_cells(std::vector<std::string>& row, const ModelParams& p) {
  row.push_back(format_g17(p.N));
  row.push_back(format_g17(p.a));
  row.push_back(format_g17(p.n_b));
  row.push_back(format_g17(p.Delta));
  row.push_back(format_g17(p.theta));
}

const std::vector<std::string> kParamColumns = {"N", "a", "nb", "delta", "theta"};

// ---- per-command runners (fill columns, rows, extra metadata) ----

void run_distribution(const RunConfig& cfg, OutputTable& t) {
  const DistributionOptions opt = dist_options(cfg);
  const auto axes = sweep_axes(cfg);
  if (axes.empty()) {
    const ModelParams p = base_params(cfg);
    const PhotonDistribution d = stationary_distribution(p, opt);
    t.columns = {"n", "x", "p"};
    for (std::int64_t n = 0; n <= d.n_max; ++n) {
      std::vector<std::string> row{std::to_string(n),
                                   p.N > 0.0 ? format_g17(n / p.N) : std::string(),
                                   format_g17(d.probs[n])};
      t.rows.push_back(std::move(row));
    }
    t.metadata.emplace_back("mean", format_g17(d.mean()));
    t.metadata.emplace_back("mean_x", format_g17(d.mean_x()));
    t.metadata.emplace_back("variance", format_g17(d.variance()));
    t.metadata.emplace_back("n_max", std::to_string(d.n_max));
    return;
  }
  std::int64_t total = 1;
  for (const auto& ax : axes) total *= ax.spec.steps;
  if (total > 1000000) throw UsageError("sweep too large (over 1e6 points)");
  t.columns = {"idx"};
  t.columns.insert(t.columns.end(), kParamColumns.begin(), kParamColumns.end());
  t.columns.insert(t.columns.end(), {"mean", "mean_x", "variance", "n_max", "error"});
  t.rows.assign(total, {});
  const ModelParams base = base_params(cfg);
  parallel_for(total, resolve_jobs(cfg.jobs), [&](std::int64_t i) {
    const ModelParams p = params_at(base, axes, i);
    std::vector<std::string> row{std::to_string(i)};
    push_param_cells(row, p);
    try {
      const PhotonDistribution d = stationary_distribution(p, opt);
      row.push_back(format_g17(d.mean()));
      row.push_back(format_g17(d.mean_x()));
      row.push_back(format_g17(d.variance()));
      row.push_back(std::to_string(d.n_max));
      row.emplace_back();
    } catch (const std::exception& e) {
      row.insert(row.end(), {"", "", "", ""});
      row.emplace_back(e.what());
    }
    t.rows[i] = std::move(row);
  });
}

void run_potential(const RunConfig& cfg, OutputTable& t) {
  ModelParams p = base_params(cfg);
  p.N = require_scalar(cfg.N, "--N");
  p.a = require_scalar(cfg.a, "--a");
  p.n_b = require_scalar(cfg.nb, "--nb");
  p.Delta = require_scalar(cfg.delta, "--delta");
  p.theta = require_scalar(cfg.theta, "--theta");
  const double quad_tol = cfg.tol.value_or(1e-10);
  t.columns = {"x", "w", "V0"};
  for (int i = 0; i < cfg.xsteps; ++i) {
    const double x = cfg.xmax * i / (cfg.xsteps - 1);
    t.rows.push_back({format_g17(x), format_g17(w_of_x(x, p)),
                      format_g17(V0(x, p, quad_tol))});
  }
}

void run_branches(const RunConfig& cfg, OutputTable& t) {
  const auto axes = sweep_axes(cfg);
  if (axes.empty()) {
    const ModelParams p = base_params(cfg);
    const CriticalSet cs = critical_set(p, 4, cfg.tol.value_or(1e-9));
    t.columns = {"label", "k", "theta", "error"};
    t.rows.push_back({"theta0_star", "0", format_g17(cs.theta0_star), ""});
    for (std::size_t k = 1; k < cs.theta_k.size(); ++k)
      t.rows.push_back({"theta" + std::to_string(k), std::to_string(k),
                        format_g17(cs.theta_k[k]), ""});
    for (const auto& [k, th] : cs.theta_cross)
      t.rows.push_back({"theta" + std::to_string(k) + std::to_string(k + 1) + "_star",
                        std::to_string(k), format_g17(th), ""});
    for (const auto& [k, th] : cs.theta_thermal)
      t.rows.push_back({"theta_t" + std::to_string(k) + "_star", std::to_string(k),
                        format_g17(th), ""});
    return;
  }
  std::int64_t total = 1;
  for (const auto& ax : axes) total *= ax.spec.steps;
  if (total > 1000000) throw UsageError("sweep too large (over 1e6 points)");
  const double quad_tol = cfg.tol.value_or(1e-10);
  t.columns = {"idx"};
  t.columns.insert(t.columns.end(), kParamColumns.begin(), kParamColumns.end());
  t.columns.insert(t.columns.end(), {"phase", "x_mean", "V0_min", "error"});
  t.rows.assign(total, {});
  const ModelParams base = base_params(cfg);
  parallel_for(total, resolve_jobs(cfg.jobs), [&](std::int64_t i) {
    const ModelParams p = params_at(base, axes, i);
    std::vector<std::string> row{std::to_string(i)};
    push_param_cells(row, p);
    try {
      const PhasePoint gp = global_phase(p, quad_tol);
      row.push_back(std::to_string(gp.k));
      row.push_back(format_g17(gp.x_mean));
      row.push_back(format_g17(gp.V0_min));
      row.emplace_back();
    } catch (const std::exception& e) {
      row.insert(row.end(), {"", "", ""});
      row.emplace_back(e.what());
    }
    t.rows[i] = std::move(row);
  });
}

void run_phase_diagram(const RunConfig& cfg, OutputTable& t) {
  const double delta = require_scalar(cfg.delta, "--delta");
  const double n_b = require_scalar(cfg.nb, "--nb");
  if (!is_sweep(cfg.theta) || !is_sweep(cfg.a))
    throw UsageError("phase-diagram: --theta and --a must be ranges lo:hi:steps");
  const SweepSpec ts = std::get<SweepSpec>(cfg.theta);
  const SweepSpec as = std::get<SweepSpec>(cfg.a);
  if (ts.steps > 2048 || as.steps > 2048)
    throw UsageError("phase-diagram: resolution above 2048 nodes per axis");
  GridSpec grid;
  grid.theta_lo = ts.lo;
  grid.theta_hi = ts.hi;
  grid.a_lo = as.lo;
  grid.a_hi = as.hi;
  grid.n_theta = static_cast<int>(ts.steps);
  grid.n_a = static_cast<int>(as.steps);
  TraceOptions opt;
  if (cfg.tol) opt.refine_quad_tol = *cfg.tol;
  opt.jobs = resolve_jobs(cfg.jobs);
  const PhaseDiagram d = trace_lines(delta, n_b, grid, opt);
  t.columns = {"kind", "theta", "a", "order", "x_jump", "error"};
  std::size_t n_points = 0;
  for (const CriticalLine& line : d.lines) {
    n_points += line.points.size();
    for (const BoundaryPoint& bp : line.points)
      t.rows.push_back({line.kind.name(), format_g17(bp.theta), format_g17(bp.a),
                        order_name(bp.order), format_g17(bp.x_jump), ""});
  }
  for (const auto& [th, av] : d.triple_points)
    t.rows.push_back({"triple_point", format_g17(th), format_g17(av), "", "", ""});
  t.metadata.emplace_back("lines", std::to_string(d.lines.size()));
  t.metadata.emplace_back("boundary_points", std::to_string(n_points));
  t.metadata.emplace_back("triple_points", std::to_string(d.triple_points.size()));
}

void run_corrlength(const RunConfig& cfg, OutputTable& t) {
  const DistributionOptions opt = dist_options(cfg);
  const auto axes = sweep_axes(cfg);
  std::int64_t total = 1;
  for (const auto& ax : axes) total *= ax.spec.steps;
  if (total > 1000000) throw UsageError("sweep too large (over 1e6 points)");
  t.columns = {"idx"};
  t.columns.insert(t.columns.end(), kParamColumns.begin(), kParamColumns.end());
  t.columns.insert(t.columns.end(),
                   {"gamma_xi", "lambda", "residual", "n_max", "split", "error"});
  t.rows.assign(total, {});
  const ModelParams base = base_params(cfg);
  auto worker = [&](std::int64_t i) {
    const ModelParams p = params_at(base, axes, i);
    std::vector<std::string> row{std::to_string(i)};
    push_param_cells(row, p);
    try {
      const SpectralResult r = correlation_length(p, opt);
      row.push_back(format_g17(r.xi));
      row.push_back(format_g17(r.gap));
      row.push_back(format_g17(r.lambda0_residual));
      row.push_back(std::to_string(r.n_max_used));
      row.push_back(r.chain_split ? "1" : "0");
      row.emplace_back();
    } catch (const std::exception& e) {
      if (axes.empty()) throw;  // scalar command: fatal
      row.insert(row.end(), {"", "", "", "", ""});
      row.emplace_back(e.what());
    }
    t.rows[i] = std::move(row);
  };
  parallel_for(total, resolve_jobs(cfg.jobs), worker);
}

void run_autocorr(const RunConfig& cfg, OutputTable& t) {
  ModelParams p = base_params(cfg);
  p.N = require_scalar(cfg.N, "--N");
  p.a = require_scalar(cfg.a, "--a");
  p.n_b = require_scalar(cfg.nb, "--nb");
  p.Delta = require_scalar(cfg.delta, "--delta");
  p.theta = require_scalar(cfg.theta, "--theta");
  std::int64_t n_max;
  if (cfg.nmax) {
    n_max = *cfg.nmax;
  } else {
    const PhotonDistribution d = stationary_distribution(p, dist_options(cfg));
    n_max = std::max<std::int64_t>(d.n_max, 10);
  }
  std::vector<double> grid(cfg.tsteps);
  for (int i = 0; i < cfg.tsteps; ++i)
    grid[i] = cfg.tmax * (i + 1) / static_cast<double>(cfg.tsteps);
  const AutocorrResult r = photon_autocorrelation(p, grid, n_max);
  const SpectralResult s = spectral_gap(build_generator(p, n_max));
  t.columns = {"t", "C"};
  for (int i = 0; i < cfg.tsteps; ++i)
    t.rows.push_back({format_g17(grid[i]), format_g17(r.C[i])});
  t.metadata.emplace_back("xi_C", format_g17(r.xi_C));
  t.metadata.emplace_back("gamma_xi", format_g17(s.xi));
  t.metadata.emplace_back("lambda", format_g17(s.gap));
  t.metadata.emplace_back("n_max", std::to_string(n_max));
}

void run_twinkle(const RunConfig& cfg, OutputTable& t) {
  ModelParams p = base_params(cfg);
  p.N = require_scalar(cfg.N, "--N");
  p.a = require_scalar(cfg.a, "--a");
  p.n_b = require_scalar(cfg.nb, "--nb");
  p.Delta = require_scalar(cfg.delta, "--delta");
  p.theta = require_scalar(cfg.theta, "--theta");
  const TwinkleExtrema ext = twinkle_extrema(p, 4);
  t.columns = {"kind", "n", "theta", "mean", "error"};
  for (std::size_t n = 0; n < ext.theta_min_positions.size(); ++n) {
    t.rows.push_back({"min", std::to_string(n), format_g17(ext.theta_min_positions[n]),
                      format_g17(ext.mean_min), ""});
    if (n < ext.theta_max_positions.size())
      t.rows.push_back({"max", std::to_string(n),
                        format_g17(ext.theta_max_positions[n]),
                        format_g17(ext.mean_max), ""});
  }
}

}  // namespace

std::optional<RunConfig> parse_config(const std::vector<std::string>& args,
                                      std::string& help_text) {
  RunConfig cfg;
  CLI::App app{"stationary photon statistics, phase structure, and correlation "
               "lengths of the large-N micromaser"};
  app.require_subcommand(1);
  for (const auto& [name, cmd] : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->fallthrough();
    (void)cmd;
  }

  std::string sN, sa, snb, sdelta, stheta, sformat = "csv";
  std::int64_t nmax = 0;
  double tol = 0.0;
  app.add_option("--N", sN, "atomic flux, scalar or lo:hi:steps");
  app.add_option("--a", sa, "excited-state weight in [0,1], scalar or sweep");
  app.add_option("--nb", snb, "thermal occupation >= 0, scalar or sweep");
  app.add_option("--delta", sdelta, "detuning, scalar or sweep");
  app.add_option("--theta", stheta, "pump parameter >= 0, scalar or sweep");
  auto* onmax = app.add_option("--nmax", nmax, "photon-number truncation cap");
  auto* otol = app.add_option("--tol", tol, "dominant numerical tolerance");
  app.add_option("--xmax", cfg.xmax, "potential: end of the x grid");
  app.add_option("--xsteps", cfg.xsteps, "potential: x grid nodes");
  app.add_option("--tmax", cfg.tmax, "autocorr: end of the time grid");
  app.add_option("--tsteps", cfg.tsteps, "autocorr: time grid nodes");
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--format", sformat, "csv or json");
  app.add_option("--jobs", cfg.jobs, "parallel sweep evaluations, 0 = auto");

  std::vector<const char*> argv;
  argv.push_back("maserphase");
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    help_text = app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const std::vector<CLI::App*> subs = app.get_subcommands();
  cfg.command = command_names().at(subs.front()->get_name());

  if (!sN.empty()) cfg.N = parse_param_value("--N", sN);
  if (!sa.empty()) cfg.a = parse_param_value("--a", sa);
  if (!snb.empty()) cfg.nb = parse_param_value("--nb", snb);
  if (!sdelta.empty()) cfg.delta = parse_param_value("--delta", sdelta);
  if (!stheta.empty()) cfg.theta = parse_param_value("--theta", stheta);

  const double inf = std::numeric_limits<double>::infinity();
  check_range(cfg.N, "--N", 0.0, inf);
  check_range(cfg.a, "--a", 0.0, 1.0);
  check_range(cfg.nb, "--nb", 0.0, inf);
  check_range(cfg.delta, "--delta", -inf, inf);
  check_range(cfg.theta, "--theta", 0.0, inf);

  if (onmax->count()) {
    if (nmax < 10) throw UsageError("--nmax: must be at least 10");
    cfg.nmax = nmax;
  }
  if (otol->count()) {
    if (!(tol > 0.0) || tol > 1e-2)
      throw UsageError("--tol: must lie in (0, 1e-2]");
    cfg.tol = tol;
  }
  if (cfg.xsteps < 2) throw UsageError("--xsteps: need at least 2");
  if (!(cfg.xmax > 0.0) || !std::isfinite(cfg.xmax))
    throw UsageError("--xmax: must be positive");
  if (cfg.tsteps < 3) throw UsageError("--tsteps: need at least 3");
  if (!(cfg.tmax > 0.0) || !std::isfinite(cfg.tmax))
    throw UsageError("--tmax: must be positive");
  if (cfg.jobs < 0) throw UsageError("--jobs: must be >= 0");
  if (sformat == "csv")
    cfg.format = OutputFormat::csv;
  else if (sformat == "json")
    cfg.format = OutputFormat::json;
  else
    throw UsageError("--format: expected csv or json");

  if (cfg.command == Command::phase_diagram) {
    if (!is_sweep(cfg.theta) && stheta.empty()) cfg.theta = SweepSpec{0.0, 25.0, 64};
    if (!is_sweep(cfg.a) && sa.empty()) cfg.a = SweepSpec{0.5, 1.0, 64};
    if (is_sweep(cfg.theta) && std::get<SweepSpec>(cfg.theta).steps < 32)
      throw UsageError("phase-diagram: --theta range needs at least 32 steps");
    if (is_sweep(cfg.a) && std::get<SweepSpec>(cfg.a).steps < 32)
      throw UsageError("phase-diagram: --a range needs at least 32 steps");
  }
  return cfg;
}

std::string config_to_json(const RunConfig& c) {
  json j;
  auto param = [](const ParamValue& v) -> json {
    if (const double* d = std::get_if<double>(&v)) return *d;
    const SweepSpec& s = std::get<SweepSpec>(v);
    return {{"lo", s.lo}, {"hi", s.hi}, {"steps", s.steps}};
  };
  j["command"] = command_name(c.command);
  j["N"] = param(c.N);
  j["a"] = param(c.a);
  j["nb"] = param(c.nb);
  j["delta"] = param(c.delta);
  j["theta"] = param(c.theta);
  if (c.nmax) j["nmax"] = *c.nmax;
  if (c.tol) j["tol"] = *c.tol;
  j["xmax"] = c.xmax;
  j["xsteps"] = c.xsteps;
  j["tmax"] = c.tmax;
  j["tsteps"] = c.tsteps;
  j["out"] = c.out;
  j["format"] = c.format == OutputFormat::csv ? "csv" : "json";
  j["jobs"] = c.jobs;
  return j.dump();
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config json: ") + e.what());
  }
  RunConfig c;
  auto param = [](const json& v) -> ParamValue {
    if (v.is_object())
      return SweepSpec{v.at("lo").get<double>(), v.at("hi").get<double>(),
                       v.at("steps").get<std::int64_t>()};
    return v.get<double>();
  };
  try {
    c.command = command_names().at(j.at("command").get<std::string>());
    c.N = param(j.at("N"));
    c.a = param(j.at("a"));
    c.nb = param(j.at("nb"));
    c.delta = param(j.at("delta"));
    c.theta = param(j.at("theta"));
    if (j.contains("nmax")) c.nmax = j.at("nmax").get<std::int64_t>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    c.xmax = j.at("xmax").get<double>();
    c.xsteps = j.at("xsteps").get<int>();
    c.tmax = j.at("tmax").get<double>();
    c.tsteps = j.at("tsteps").get<int>();
    c.out = j.at("out").get<std::string>();
    c.format = j.at("format").get<std::string>() == "json" ? OutputFormat::json
                                                           : OutputFormat::csv;
    c.jobs = j.at("jobs").get<int>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("config json: ") + e.what());
  } catch (const std::out_of_range&) {
    throw UsageError("config json: unknown command");
  }
  return c;
}

OutputTable run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputTable t;
  t.metadata.emplace_back("command", command_name(cfg.command));
  t.metadata.emplace_back("config", config_to_json(cfg));
  t.metadata.emplace_back("version", kVersion);
  switch (cfg.command) {
    case Command::distribution: run_distribution(cfg, t); break;
    case Command::potential: run_potential(cfg, t); break;
    case Command::branches: run_branches(cfg, t); break;
    case Command::phase_diagram: run_phase_diagram(cfg, t); break;
    case Command::corrlength: run_corrlength(cfg, t); break;
    case Command::autocorr: run_autocorr(cfg, t); break;
    case Command::twinkle: run_twinkle(cfg, t); break;
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  t.metadata.emplace_back("wall_time_s", format_g17(dt.count()));
  return t;
}

void write_table(std::ostream& os, const OutputTable& t, OutputFormat format) {
  if (format == OutputFormat::csv) {
    for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      os << t.columns[i] << (i + 1 < t.columns.size() ? "," : "");
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        os << row[i] << (i + 1 < row.size() ? "," : "");
      os << "\n";
    }
    return;
  }
  // cells and metadata are stored as strings; hand numeric ones to JSON
  // consumers as numbers (the %.17g text round-trips through the parser)
  auto cell = [](const std::string& v) -> json {
    if (v.empty()) return v;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() + v.size() && std::isfinite(x)) return x;
    return v;
  };
  json j;
  json meta = json::object();
  for (const auto& [k, v] : t.metadata) {
    if (k == "config") {
      meta[k] = json::parse(v);
      continue;
    }
    meta[k] = cell(v);
  }
  j["metadata"] = meta;
  j["columns"] = t.columns;
  j["rows"] = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const std::string& v : row) r.push_back(cell(v));
    j["rows"].push_back(std::move(r));
  }
  os << j.dump(1) << "\n";
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    std::string help;
    const std::optional<RunConfig> cfg = parse_config(args, help);
    if (!cfg) {
      std::cout << help;
      return 0;
    }
    const OutputTable table = run(*cfg);
    if (cfg->out.empty()) {
      write_table(std::cout, table, cfg->format);
    } else {
      std::ofstream f(cfg->out);
      if (!f) throw UsageError("--out: cannot open '" + cfg->out + "'");
      write_table(f, table, cfg->format);
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace maser
