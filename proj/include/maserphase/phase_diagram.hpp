#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maserphase/params.hpp"

namespace maser {

enum class TransitionOrder { First, Second };

// Phase labels: -1 for thermal, k >= 0 for the maser branch that owns the
// global minimum.  A line separates the two labels it stores.
struct LineKind {
  int low = -1;
  int high = 0;
  auto operator<=>(const LineKind&) const = default;
  std::string name() const;  // thermal_onset / thermal_maser_K / maser_maser_J_K
};

struct BoundaryPoint {
  double theta = 0.0;
  double a = 0.0;
  TransitionOrder order = TransitionOrder::Second;
  double x_jump = 0.0;  // |<x>| discontinuity measured across the line
};

struct CriticalLine {
  LineKind kind;
  std::vector<BoundaryPoint> points;  // sorted by (theta, a)
};

struct GridSpec {
  double theta_lo = 0.0, theta_hi = 25.0;
  double a_lo = 0.5, a_hi = 1.0;
  int n_theta = 64, n_a = 64;  // nodes per axis, endpoints included
};

struct PhaseDiagram {
  std::vector<CriticalLine> lines;
  std::vector<std::pair<double, double>> triple_points;  // (theta, a)
  double Delta = 0.0, n_b = 0.0;
  GridSpec grid;
  std::vector<int> labels;  // row-major [ja * n_theta + it] phase labels

  double node_theta(int it) const;
  double node_a(int ja) const;
};

// The analytic second-order onset a(theta) = (1 + Delta^2/sin^2(theta*Delta))/2
// (limit (1 + 1/theta^2)/2 at Delta = 0), restricted to a <= 1; grid points
// where the line leaves the window are omitted.
CriticalLine first_critical_line(double delta, double theta_lo, double theta_hi,
                                 int n_points);

struct TraceOptions {
  double edge_tol = 1e-7;        // bisection width along one grid edge
  double coarse_quad_tol = 1e-8;  // potential tolerance for grid labels
  double refine_quad_tol = 1e-10;  // tolerance during edge bisection
  double first_order_jump = 1e-3;  // <x> jump separating First from Second
  int jobs = 0;                  // 0 = all hardware threads, 1 = serial
};

// Labels the grid with the global phase, bisects every labeled edge, and
// groups the refined boundary points into lines keyed by their label pair.
// Triple points are filled in whenever the grid is at least 64x64.
PhaseDiagram trace_lines(double delta, double n_b, const GridSpec& grid,
                         const TraceOptions& opt = {});

// Meeting points of distinct refined lines: closest approach below tol
// (measured in grid-span units), confirmed by a third phase label among the
// surrounding 3x3 block of grid nodes.
std::vector<std::pair<double, double>> find_triple_points(
    const PhaseDiagram& diagram, double tol);

// The |Delta| where branch_crossing(k) stops existing, by bisection on
// existence over |Delta| in (0, sqrt(a-b)); beyond it the two minima are
// separated by a thermal window.
double separation_threshold(double a, double n_b, int k, double tol = 1e-4);

}  // namespace maser
