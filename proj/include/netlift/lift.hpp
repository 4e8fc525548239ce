#pragma once

#include <cstdint>
#include <vector>

#include "netlift/model.hpp"

namespace netlift {

// Node-centered 3D grid over (x1, x2, s). Cell counts n, m, p give
// (n+1) x (m+1) x (p+1) nodes; the domain rectangle sits `band` cells inside
// the footprint on every side.
struct Grid3 {
  int n = 0, m = 0, p = 0;
  double h1 = 0.0, h2 = 0.0, hs = 0.0;
  Vec2 origin;      // position of node (0,0)
  double s0 = 0.0;  // s value of layer 0
  int band = 1;

  int nx() const { return n + 1; }
  int ny() const { return m + 1; }
  int nlayers() const { return p + 1; }
  int ncols() const { return nx() * ny(); }
  std::size_t nnodes() const { return static_cast<std::size_t>(ncols()) * nlayers(); }

  int col(int i, int j) const { return j * nx() + i; }
  std::size_t node(int i, int j, int l) const {
    return static_cast<std::size_t>(l) * ncols() + col(i, j);
  }

  double x(int i) const { return origin.x + i * h1; }
  double y(int j) const { return origin.y + j * h2; }
  double s(int l) const { return s0 + l * hs; }
  Vec2 xy(int i, int j) const { return {x(i), y(j)}; }

  // node lies in the closed domain rectangle
  bool in_domain(int i, int j) const {
    return i >= band && i <= n - band && j >= band && j <= m - band;
  }
};

// Cumulative signed boundary mass, piecewise constant in arclength and
// right-continuous at the atoms.
struct BoundaryTrace {
  std::vector<double> breakpoints;  // atom positions, strictly increasing
  std::vector<double> values;       // value on [breakpoints[i], breakpoints[i+1])
  double perimeter = 0.0;

  double eval(double t) const;       // right-continuous: atoms at t count
  double eval_left(double t) const;  // left limit: atoms at t do not count
  double min_value() const;
  double max_value() const;
};

BoundaryTrace boundary_trace(const Scenario& sc);

enum class NodeState : std::uint8_t { Interior = 0, BoundaryFixed = 1 };

struct LiftedField {
  Grid3 grid;
  std::vector<double> v;            // layer-major: v[l*ncols + col]
  std::vector<std::uint8_t> state;  // NodeState per node
  std::vector<double> frozen;       // boundary data, authoritative on fixed nodes

  double& at(int i, int j, int l) { return v[grid.node(i, j, l)]; }
  double at(int i, int j, int l) const { return v[grid.node(i, j, l)]; }
  bool is_fixed(int i, int j, int l) const {
    return state[grid.node(i, j, l)] == static_cast<std::uint8_t>(NodeState::BoundaryFixed);
  }
};

// Grid construction: spacings from the footprint, s-range spanning
// [trace_min - hs, trace_max + hs] after snapping atoms to boundary nodes.
Grid3 build_grid(const Scenario& sc, int n, int m, int p, int band);

// Snaps every boundary atom to the nearest grid node on the domain boundary;
// returns the snapped scenario and the largest displacement.
struct SnapResult {
  Scenario scenario;
  double max_displacement = 0.0;
};
SnapResult snap_scenario(const Scenario& sc, const Grid3& g);

// Subgraph indicator of the boundary extension: fixed nodes carry
// 1 if trace(closest boundary point) > s_l, interior nodes get the same
// values as a warm start. Every column is pinned to 1 at l=0 and 0 at l=p.
LiftedField indicator_boundary_data(const BoundaryTrace& trace, const Grid3& g);

// Euclidean projection onto the feasible primal set: clamp interior values to
// [0,1], restore frozen values on fixed nodes.
LiftedField project_C(LiftedField f);
void project_C_inplace(LiftedField& f);

// Max violation of the primal feasible set (clamp range + frozen values).
double feasibility_violation_C(const LiftedField& f);

// Everything needed to run the lifted solver on a scenario.
struct LiftedProblem {
  Scenario snapped;
  double snap_displacement = 0.0;
  Grid3 grid;
  BoundaryTrace trace;
  LiftedField initial;
};

LiftedProblem build_problem(const Scenario& sc, int n, int m, int p, int band);

}  // namespace netlift
