#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "netlift/extract.hpp"
#include "netlift/solver.hpp"
#include "support/test_util.hpp"

using namespace netlift;
namespace tu = netlift::testutil;

namespace {

GridImage make_image(int nx, int ny, double h, int band = 1) {
  GridImage u;
  u.nx = nx;
  u.ny = ny;
  u.h1 = u.h2 = h;
  u.origin = {-band * h, -band * h};
  u.band = band;
  u.u.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  return u;
}

// image of a vertical pipe: u = height for nodes right of x_step
GridImage pipe_image(int nx, int ny, double h, double x_step, double height) {
  GridImage u = make_image(nx, ny, h);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (u.x(i) > x_step) u.at(i, j) = height;
  return u;
}

Grid3 raw_grid(int n, int m, int p, double h, double hs, double s0) {
  Grid3 g;
  g.n = n;
  g.m = m;
  g.p = p;
  g.h1 = g.h2 = h;
  g.hs = hs;
  g.origin = {-h, -h};
  g.s0 = s0;
  g.band = 1;
  return g;
}

}  // namespace

TEST_CASE("collapse counts layers below the threshold") {
  Grid3 g = raw_grid(2, 2, 6, 0.5, 0.5, 0.0);
  LiftedField f;
  f.grid = g;
  f.v.assign(g.nnodes(), 0.0);
  f.state.assign(g.nnodes(), 0);
  f.frozen.assign(g.nnodes(), 0.0);
  // binary monotone column: ones at l = 0,1,2 -> u = s0 + 3*hs = 1.5
  for (int c = 0; c < g.ncols(); ++c)
    for (int l = 0; l < 3; ++l) f.v[static_cast<std::size_t>(l) * g.ncols() + c] = 1.0;
  CollapseResult out = collapse(f, g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) CHECK(out.u.at(i, j) == doctest::Approx(1.5));
  CHECK(out.binarity_score == 0.0);

  // values near 1/2 count as fractional
  f.v[static_cast<std::size_t>(3) * g.ncols() + g.col(1, 1)] = 0.5;
  CollapseResult frac = collapse(f, g);
  CHECK(frac.binarity_score > 0.0);
}

TEST_CASE("collapse of the zero-trace boundary data is the zero image") {
  Scenario sc;
  sc.width = 1.0;
  sc.height = 1.0;
  sc.model = TransportModel::urban(2.0, 0.5);
  LiftedProblem pb = build_problem(sc, 8, 8, 8, 1);
  CollapseResult out = collapse(pb.initial, pb.grid);
  for (double v : out.u.u) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("soft collapse agrees with counting collapse on binary fields") {
  Scenario sc;
  sc.width = 1.0;
  sc.height = 1.0;
  sc.model = TransportModel::urban(2.0, 0.5);
  sc.sources.atoms = {{0.5, 1.0}};
  sc.sinks.atoms = {{2.5, 1.0}};
  LiftedProblem pb = build_problem(sc, 10, 10, 10, 1);
  CollapseResult hard = collapse(pb.initial, pb.grid);
  GridImage soft = collapse_soft(pb.initial, pb.grid);
  for (std::size_t q = 0; q < hard.u.u.size(); ++q)
    CHECK(soft.u[q] == doctest::Approx(hard.u.u[q]));
}

TEST_CASE("flux of a linear image is the unit upward flow") {
  GridImage u = make_image(10, 8, 0.25);
  for (int j = 0; j < u.ny; ++j)
    for (int i = 0; i < u.nx; ++i) u.at(i, j) = u.x(i);
  FluxField f = flux(u);
  for (double v : f.fx) CHECK(v == doctest::Approx(0.0));
  for (double v : f.fy) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("flux of a constant image vanishes") {
  GridImage u = make_image(6, 6, 0.5);
  for (auto& v : u.u) v = 3.25;
  FluxField f = flux(u);
  for (double v : f.fx) CHECK(v == 0.0);
  for (double v : f.fy) CHECK(v == 0.0);
}

TEST_CASE("horizontal step concentrates horizontal flux on one face row") {
  const double w = 0.75, h = 0.25;
  GridImage u = make_image(8, 8, h);
  for (int j = 0; j < u.ny; ++j)
    for (int i = 0; i < u.nx; ++i) u.at(i, j) = (u.y(j) > 0.5) ? w : 0.0;
  FluxField f = flux(u);
  int hot_rows = 0;
  for (int j = 0; j + 1 < u.ny; ++j) {
    const double fx = f.fx[static_cast<std::size_t>(j) * u.nx + 0];
    if (std::abs(fx) > 1e-12) {
      ++hot_rows;
      CHECK(std::abs(fx) == doctest::Approx(w / h));
    }
  }
  CHECK(hot_rows == 1);
}

TEST_CASE("flux is discretely divergence-free for 100 random images") {
  auto rng = tu::rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    GridImage u = make_image(9, 7, 0.1);
    for (auto& v : u.u) v = tu::uniform(rng, -3.0, 3.0);
    CHECK(flux_divergence(flux(u)) <= 1e-12);
  }
}

TEST_CASE("grid energy basics") {
  const TransportModel urban = TransportModel::urban(2.0, 0.5);
  GridImage zero = make_image(10, 10, 0.125);
  CHECK(grid_energy(zero, urban) == 0.0);

  // unit jump spanning the unit-height domain: min(2, 1.5) * 1
  GridImage pipe = pipe_image(11, 11, 0.125, 0.5, 1.0);
  CHECK(grid_energy(pipe, urban) == doctest::Approx(1.5));
  CHECK(grid_energy(pipe, TransportModel::branched(0.5)) == doctest::Approx(1.0));
}

TEST_CASE("grid energy is monotone non-decreasing in eps") {
  auto rng = tu::rng(808);
  GridImage u = make_image(8, 8, 0.2);
  for (auto& v : u.u) v = tu::uniform(rng, 0.0, 2.0);
  double prev = grid_energy(u, TransportModel::urban(3.0, 1e-6));
  for (double eps : {0.01, 0.1, 0.5, 1.0, 2.0}) {
    const double e = grid_energy(u, TransportModel::urban(3.0, eps));
    CHECK(e >= prev - 1e-12);
    prev = e;
  }
}

TEST_CASE("axis-aligned graphs and their images have equal cost") {
  // pipes and monotone staircases drawn on grid lines, h1 = h2
  auto rng = tu::rng(77);
  const int cells = 16;
  const double h = 1.0 / cells;
  for (int trial = 0; trial < 20; ++trial) {
    const double mass = tu::uniform(rng, 0.3, 2.0);
    const int i_in = 2 + static_cast<int>(tu::uniform(rng, 0.0, cells - 4.99));
    const int i_out = 2 + static_cast<int>(tu::uniform(rng, 0.0, cells - 4.99));
    const int j_bend = 3 + static_cast<int>(tu::uniform(rng, 0.0, cells - 6.99));
    const double x_in = i_in * h, x_out = i_out * h, y_bend = j_bend * h;

    // staircase transport path from (x_in, 0) up, across, and up to (x_out, 1)
    TransportGraph g;
    g.vertices = {{x_in, 0.0}, {x_in, y_bend}, {x_out, y_bend}, {x_out, 1.0}};
    g.edges = {{0, 1, mass}, {1, 2, mass}, {2, 3, mass}};
    g = canonical(g);  // drops the middle edge when x_in == x_out

    // corresponding image: mass to the right of the path
    GridImage u = make_image(cells + 3, cells + 3, h);
    for (int j = 0; j < u.ny; ++j) {
      for (int i = 0; i < u.nx; ++i) {
        const double x = u.x(i), y = u.y(j);
        const double xs = y < y_bend ? x_in : x_out;
        u.at(i, j) = x > xs ? mass : 0.0;
      }
    }
    const TransportModel model = trial % 2 == 0
                                     ? TransportModel::urban(1.0 + tu::uniform(rng, 0.5, 4.0),
                                                             tu::uniform(rng, 0.05, 1.0))
                                     : TransportModel::branched(tu::uniform(rng, 0.1, 0.9));
    CHECK(grid_energy(u, model) == doctest::Approx(graph_cost(g, model)).epsilon(1e-10));
  }
}

TEST_CASE("extract_network emits faces above the mass tolerance") {
  const TransportModel urban = TransportModel::urban(2.0, 0.5);
  (void)urban;
  GridImage constant = make_image(8, 8, 0.25);
  CHECK(extract_network(constant, 0.1).empty());
  CHECK_THROWS_AS(extract_network(constant, 0.0), invalid_parameter);

  GridImage pipe = pipe_image(11, 11, 0.125, 0.4999, 1.0);
  NetworkSegments segs = extract_network(pipe, 0.25);
  REQUIRE(!segs.empty());
  for (const auto& s : segs) {
    CHECK(s.mass == doctest::Approx(1.0));
    CHECK(s.a.x == doctest::Approx(s.b.x));          // vertical faces only
    CHECK(std::abs(s.a.x - 0.5) <= 0.125 + 1e-12);   // within one cell of the line
  }
  // one maximal collinear run through the domain
  CHECK(count_strands(pipe, 0.5, 0.25) == 1);
}

TEST_CASE("round trip: indicator of a step image collapses back to it") {
  Scenario sc;
  sc.width = 1.0;
  sc.height = 1.0;
  sc.model = TransportModel::urban(2.0, 0.5);
  sc.sources.atoms = {{0.25, 1.0}};
  sc.sinks.atoms = {{2.0 + (1.0 - 0.25), 1.0}};
  LiftedProblem pb = build_problem(sc, 12, 12, 10, 1);
  CollapseResult out = collapse(pb.initial, pb.grid);
  // the collapsed heights equal the sampled boundary extension up to hs
  BoundaryTrace tr = pb.trace;
  Scenario geo = pb.snapped;
  for (int j = 0; j < pb.grid.ny(); ++j) {
    for (int i = 0; i < pb.grid.nx(); ++i) {
      if (pb.grid.in_domain(i, j)) continue;  // interior warm start not asserted
      const double t = geo.boundary_arclength(pb.grid.xy(i, j));
      const double want = t >= geo.width + geo.height ? tr.eval_left(t) : tr.eval(t);
      CHECK(out.u.at(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}
