#include "netlift/lift.hpp"

#include <algorithm>
#include <cmath>

namespace netlift {

double BoundaryTrace::eval(double t) const {
  if (perimeter > 0.0) {
    t = std::fmod(t, perimeter);
    if (t < 0.0) t += perimeter;
  }
  // value on [breakpoints[i], breakpoints[i+1]); 0 before the first atom
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  if (it == breakpoints.begin()) return 0.0;
  return values[static_cast<size_t>(it - breakpoints.begin()) - 1];
}

double BoundaryTrace::eval_left(double t) const {
  if (perimeter > 0.0) {
    t = std::fmod(t, perimeter);
    if (t < 0.0) t += perimeter;
  }
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
  if (it == breakpoints.begin()) return 0.0;
  return values[static_cast<size_t>(it - breakpoints.begin()) - 1];
}

double BoundaryTrace::min_value() const {
  double v = 0.0;
  for (double x : values) v = std::min(v, x);
  return v;
}

double BoundaryTrace::max_value() const {
  double v = 0.0;
  for (double x : values) v = std::max(v, x);
  return v;
}

BoundaryTrace boundary_trace(const Scenario& sc) {
  validate(sc);
  struct Ev {
    double t;
    double w;
  };
  std::vector<Ev> events;
  for (const auto& a : sc.sources.atoms) events.push_back({a.t, a.w});
  for (const auto& a : sc.sinks.atoms) events.push_back({a.t, -a.w});
  std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });

  BoundaryTrace tr;
  tr.perimeter = sc.perimeter();
  double cum = 0.0;
  for (const auto& e : events) {
    cum += e.w;
    if (!tr.breakpoints.empty() && tr.breakpoints.back() == e.t) {
      tr.values.back() = cum;
    } else {
      tr.breakpoints.push_back(e.t);
      tr.values.push_back(cum);
    }
  }
  return tr;
}

Grid3 build_grid(const Scenario& sc, int n, int m, int p, int band) {
  validate(sc);
  if (band < 1) throw config_error("build_grid: band must be >= 1");
  if (n < 2 * band + 2 || m < 2 * band + 2 || p < 2 * band + 2)
    throw config_error("build_grid: cell counts must be >= 2*band + 2");

  Grid3 g;
  g.n = n;
  g.m = m;
  g.p = p;
  g.band = band;
  g.h1 = sc.width / (n - 2 * band);
  g.h2 = sc.height / (m - 2 * band);
  g.origin = {-band * g.h1, -band * g.h2};

  // s-range from the trace of the snapped measures, one spare layer past the
  // extremes on each side
  SnapResult snap = snap_scenario(sc, g);
  BoundaryTrace tr = boundary_trace(snap.scenario);
  double lo = tr.min_value(), hi = tr.max_value();
  double range = hi - lo;
  if (range <= 0.0) range = 1.0;  // degenerate trace, e.g. empty measures
  g.hs = range / (p - 2);
  g.s0 = lo - g.hs;
  return g;
}

SnapResult snap_scenario(const Scenario& sc, const Grid3& g) {
  // arclength positions of the grid nodes lying on the domain boundary
  std::vector<double> node_ts;
  for (int i = g.band; i <= g.n - g.band; ++i) node_ts.push_back(g.x(i) - 0.0);
  for (int j = g.band + 1; j <= g.m - g.band; ++j) node_ts.push_back(sc.width + g.y(j));
  for (int i = g.n - g.band - 1; i >= g.band; --i)
    node_ts.push_back(sc.width + sc.height + (sc.width - g.x(i)));
  for (int j = g.m - g.band - 1; j > g.band; --j)
    node_ts.push_back(2.0 * sc.width + sc.height + (sc.height - g.y(j)));
  std::sort(node_ts.begin(), node_ts.end());

  const double per = sc.perimeter();
  auto snap_t = [&](double t) {
    double best = node_ts[0], bd = per;
    for (double nt : node_ts) {
      double d = std::abs(nt - t);
      d = std::min(d, per - d);  // wrap-around distance
      if (d < bd) {
        bd = d;
        best = nt;
      }
    }
    return std::pair<double, double>{best, bd};
  };

  SnapResult out;
  out.scenario = sc;
  auto snap_measure = [&](BoundaryMeasure& mb) {
    for (auto& a : mb.atoms) {
      auto [t, d] = snap_t(a.t);
      out.max_displacement = std::max(out.max_displacement, d);
      a.t = t;
    }
    mb = canonical(mb, per);
  };
  snap_measure(out.scenario.sources);
  snap_measure(out.scenario.sinks);
  validate(out.scenario);
  return out;
}

LiftedField indicator_boundary_data(const BoundaryTrace& trace, const Grid3& g) {
  LiftedField f;
  f.grid = g;
  f.v.assign(g.nnodes(), 0.0);
  f.state.assign(g.nnodes(), static_cast<std::uint8_t>(NodeState::Interior));
  f.frozen.assign(g.nnodes(), 0.0);

  // u extended off the boundary by closest-point projection; interior columns
  // get the same indicator as a warm start but stay free.
  Scenario geo;  // only the rectangle geometry matters for arclength lookup
  geo.width = (g.n - 2 * g.band) * g.h1;
  geo.height = (g.m - 2 * g.band) * g.h2;

  // Atoms sit exactly on boundary nodes after snapping; sample the trace
  // continuously in the +x / +y direction so matched atoms on opposite edges
  // induce their steps across the same node faces. Arclength runs against x
  // on the top edge and against y on the left edge, so those take the left
  // limit.
  const double t_top = geo.width + geo.height;  // top and left edges follow
  auto sample = [&](double t) { return t >= t_top ? trace.eval_left(t) : trace.eval(t); };

  const int C = g.ncols();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double t = geo.boundary_arclength(g.xy(i, j));
      const double u = sample(t);
      const bool fixed_col = !g.in_domain(i, j);
      const int c = g.col(i, j);
      for (int l = 0; l <= g.p; ++l) {
        double val = (u > g.s(l)) ? 1.0 : 0.0;
        if (l == 0) val = 1.0;
        if (l == g.p) val = 0.0;
        const std::size_t idx = static_cast<std::size_t>(l) * C + c;
        f.v[idx] = val;
        if (fixed_col || l == 0 || l == g.p) {
          f.state[idx] = static_cast<std::uint8_t>(NodeState::BoundaryFixed);
          f.frozen[idx] = val;
        }
      }
    }
  }
  return f;
}

void project_C_inplace(LiftedField& f) {
  const std::size_t n = f.v.size();
  for (std::size_t q = 0; q < n; ++q) {
    if (f.state[q]) {
      f.v[q] = f.frozen[q];
    } else {
      f.v[q] = std::clamp(f.v[q], 0.0, 1.0);
    }
  }
}

LiftedField project_C(LiftedField f) {
  project_C_inplace(f);
  return f;
}

double feasibility_violation_C(const LiftedField& f) {
  double viol = 0.0;
  for (std::size_t q = 0; q < f.v.size(); ++q) {
    if (f.state[q]) {
      viol = std::max(viol, std::abs(f.v[q] - f.frozen[q]));
    } else {
      viol = std::max(viol, std::max(-f.v[q], f.v[q] - 1.0));
    }
  }
  return std::max(viol, 0.0);
}

LiftedProblem build_problem(const Scenario& sc, int n, int m, int p, int band) {
  LiftedProblem pb;
  pb.grid = build_grid(sc, n, m, p, band);
  SnapResult snap = snap_scenario(sc, pb.grid);
  pb.snapped = snap.scenario;
  pb.snap_displacement = snap.max_displacement;
  pb.trace = boundary_trace(pb.snapped);
  pb.initial = indicator_boundary_data(pb.trace, pb.grid);
  return pb;
}

}  // namespace netlift
