#include "maserphase/phase_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "maserphase/errors.hpp"
#include "maserphase/parallel.hpp"
#include "maserphase/potential.hpp"

namespace maser {

std::string LineKind::name() const {
  if (low < 0) {
    if (high == 0) return "thermal_onset";
    return "thermal_maser_" + std::to_string(high);
  }
  return "maser_maser_" + std::to_string(low) + "_" + std::to_string(high);
}

double PhaseDiagram::node_theta(int it) const {
  return grid.theta_lo + (grid.theta_hi - grid.theta_lo) * it / (grid.n_theta - 1);
}

double PhaseDiagram::node_a(int ja) const {
  return grid.a_lo + (grid.a_hi - grid.a_lo) * ja / (grid.n_a - 1);
}

CriticalLine first_critical_line(double delta, double theta_lo, double theta_hi,
                                 int n_points) {
  if (!(theta_lo > 0.0) || !(theta_hi > theta_lo))
    throw DomainError("first_critical_line: need 0 < theta_lo < theta_hi");
  if (n_points < 2) throw DomainError("first_critical_line: n_points < 2");
  CriticalLine line;
  line.kind = {-1, 0};
  for (int i = 0; i < n_points; ++i) {
    const double theta = theta_lo + (theta_hi - theta_lo) * i / (n_points - 1);
    double a;
    if (delta == 0.0) {
      a = 0.5 * (1.0 + 1.0 / (theta * theta));
    } else {
      const double s = std::sin(theta * delta);
      if (s == 0.0) continue;
      a = 0.5 * (1.0 + delta * delta / (s * s));
    }
    if (a > 1.0) continue;
    line.points.push_back({theta, a, TransitionOrder::Second, 0.0});
  }
  return line;
}

namespace {

struct NodeEval {
  int label;      // -1 thermal, else branch index
  double x_mean;  // asymptotic order parameter of the winning phase
};

NodeEval eval_phase(double theta, double a, double delta, double n_b,
                    double quad_tol) {
  ModelParams p;
  p.a = a;
  p.n_b = n_b;
  p.Delta = delta;
  p.theta = theta;
  const PhasePoint gp = global_phase(p, quad_tol);
  return {gp.k, gp.x_mean};
}

struct EdgeTask {
  double t0, a0, t1, a1;  // endpoints; exactly one coordinate differs
};

struct RefinedEdge {
  BoundaryPoint point;
  LineKind kind;
};

std::optional<RefinedEdge> refine_edge(const EdgeTask& e, double delta,
                                       double n_b, const TraceOptions& opt) {
  double lo = 0.0, hi = 1.0;  // position along the edge
  auto at = [&](double s) {
    return eval_phase(e.t0 + s * (e.t1 - e.t0), e.a0 + s * (e.a1 - e.a0), delta,
                      n_b, opt.refine_quad_tol);
  };
  NodeEval lo_ev = at(lo), hi_ev = at(hi);
  if (lo_ev.label == hi_ev.label) return std::nullopt;  // coarse-tol mirage
  const double span = std::abs(e.t1 - e.t0) + std::abs(e.a1 - e.a0);
  while (span * (hi - lo) > opt.edge_tol) {
    const double mid = 0.5 * (lo + hi);
    const NodeEval mid_ev = at(mid);
    if (mid_ev.label == lo_ev.label) {
      lo = mid;
      lo_ev = mid_ev;
    } else {
      hi = mid;
      hi_ev = mid_ev;
    }
  }
  const double s = 0.5 * (lo + hi);
  RefinedEdge re;
  re.point.theta = e.t0 + s * (e.t1 - e.t0);
  re.point.a = e.a0 + s * (e.a1 - e.a0);
  re.point.x_jump = std::abs(hi_ev.x_mean - lo_ev.x_mean);
  re.point.order = re.point.x_jump > opt.first_order_jump
                       ? TransitionOrder::First
                       : TransitionOrder::Second;
  re.kind = {std::min(lo_ev.label, hi_ev.label),
             std::max(lo_ev.label, hi_ev.label)};
  return re;
}

}  // namespace

PhaseDiagram trace_lines(double delta, double n_b, const GridSpec& grid,
                         const TraceOptions& opt) {
  if (grid.n_theta < 32 || grid.n_a < 32)
    throw DomainError("trace_lines: resolution below 32x32");
  if (!(grid.theta_hi > grid.theta_lo) || !(grid.a_hi > grid.a_lo))
    throw DomainError("trace_lines: empty window");

  PhaseDiagram d;
  d.Delta = delta;
  d.n_b = n_b;
  d.grid = grid;
  const int nt = grid.n_theta, na = grid.n_a;
  d.labels.assign(static_cast<std::size_t>(nt) * na, 0);

  parallel_for(static_cast<std::int64_t>(nt) * na, opt.jobs, [&](std::int64_t idx) {
    const int it = static_cast<int>(idx % nt), ja = static_cast<int>(idx / nt);
    d.labels[idx] =
        eval_phase(d.node_theta(it), d.node_a(ja), delta, n_b, opt.coarse_quad_tol)
            .label;
  });

  std::vector<EdgeTask> edges;
  for (int ja = 0; ja < na; ++ja)
    for (int it = 0; it + 1 < nt; ++it)
      if (d.labels[ja * nt + it] != d.labels[ja * nt + it + 1])
        edges.push_back({d.node_theta(it), d.node_a(ja), d.node_theta(it + 1),
                         d.node_a(ja)});
  for (int it = 0; it < nt; ++it)
    for (int ja = 0; ja + 1 < na; ++ja)
      if (d.labels[ja * nt + it] != d.labels[(ja + 1) * nt + it])
        edges.push_back({d.node_theta(it), d.node_a(ja), d.node_theta(it),
                         d.node_a(ja + 1)});

  std::vector<std::optional<RefinedEdge>> refined(edges.size());
  parallel_for(static_cast<std::int64_t>(edges.size()), opt.jobs,
               [&](std::int64_t i) { refined[i] = refine_edge(edges[i], delta, n_b, opt); });

  std::map<LineKind, std::vector<BoundaryPoint>> grouped;
  for (const auto& re : refined)
    if (re) grouped[re->kind].push_back(re->point);
  for (auto& [kind, pts] : grouped) {
    std::sort(pts.begin(), pts.end(), [](const BoundaryPoint& p, const BoundaryPoint& q) {
      return p.theta != q.theta ? p.theta < q.theta : p.a < q.a;
    });
    d.lines.push_back({kind, std::move(pts)});
  }

  if (nt >= 64 && na >= 64)
    d.triple_points = find_triple_points(d, 2.0 / std::min(nt, na));
  return d;
}

std::vector<std::pair<double, double>> find_triple_points(
    const PhaseDiagram& d, double tol) {
  if (d.grid.n_theta < 64 || d.grid.n_a < 64)
    throw DomainError("find_triple_points: needs a grid of at least 64x64");
  if (!(tol > 0.0)) throw DomainError("find_triple_points: tol must be positive");

  const double t_span = d.grid.theta_hi - d.grid.theta_lo;
  const double a_span = d.grid.a_hi - d.grid.a_lo;
  const int nt = d.grid.n_theta, na = d.grid.n_a;

  auto three_labels_near = [&](double theta, double a) {
    const int it = static_cast<int>(
        std::lround((theta - d.grid.theta_lo) / t_span * (nt - 1)));
    const int ja =
        static_cast<int>(std::lround((a - d.grid.a_lo) / a_span * (na - 1)));
    std::set<int> seen;
    for (int dj = -2; dj <= 2; ++dj)
      for (int di = -2; di <= 2; ++di) {
        const int i = std::clamp(it + di, 0, nt - 1);
        const int j = std::clamp(ja + dj, 0, na - 1);
        seen.insert(d.labels[j * nt + i]);
      }
    return seen.size() >= 3;
  };

  std::vector<std::pair<double, double>> found;
  for (std::size_t la = 0; la < d.lines.size(); ++la)
    for (std::size_t lb = la + 1; lb < d.lines.size(); ++lb) {
      double best = tol;
      std::pair<double, double> cand{0.0, 0.0};
      bool have = false;
      for (const BoundaryPoint& p : d.lines[la].points)
        for (const BoundaryPoint& q : d.lines[lb].points) {
          const double dt = (p.theta - q.theta) / t_span;
          const double da = (p.a - q.a) / a_span;
          const double dist = std::hypot(dt, da);
          if (dist < best) {
            best = dist;
            cand = {0.5 * (p.theta + q.theta), 0.5 * (p.a + q.a)};
            have = true;
          }
        }
      if (have && three_labels_near(cand.first, cand.second)) found.push_back(cand);
    }

  // merge duplicates: the same junction shows up once per line pair
  std::sort(found.begin(), found.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& c : found) {
    bool dup = false;
    for (const auto& o : out)
      if (std::hypot((c.first - o.first) / t_span, (c.second - o.second) / a_span) <
          tol)
        dup = true;
    if (!dup) out.push_back(c);
  }
  return out;
}

double separation_threshold(double a, double n_b, int k, double tol) {
  if (!(a > 0.5) || a > 1.0) throw DomainError("separation_threshold: needs 1/2 < a <= 1");
  if (k < 0 || k >= kBranchCap) throw DomainError("separation_threshold: bad branch index");
  if (!(tol > 0.0)) throw DomainError("separation_threshold: tol must be positive");

  auto crossing_exists = [&](double delta) {
    ModelParams p;
    p.a = a;
    p.n_b = n_b;
    p.Delta = delta;
    try {
      branch_crossing(p, k, 1e-7);
      return true;
    } catch (const NoCrossingError&) {
      return false;
    }
  };

  const double root_gap = std::sqrt(2.0 * a - 1.0);
  double lo = 1e-3 * root_gap, hi = 0.999 * root_gap;
  if (!crossing_exists(lo) || crossing_exists(hi))
    throw DomainError("separation_threshold: no separation inside (0, sqrt(a-b))");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (crossing_exists(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace maser
