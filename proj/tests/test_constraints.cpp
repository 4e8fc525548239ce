#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "netlift/constraints.hpp"
#include "support/projection_oracle.hpp"
#include "support/test_util.hpp"

using namespace netlift;
namespace tu = netlift::testutil;

namespace {

Grid3 tiny_grid(int n, int m, int p, double hs) {
  Grid3 g;
  g.n = n;
  g.m = m;
  g.p = p;
  g.h1 = g.h2 = 0.25;
  g.hs = hs;
  g.origin = {-0.25, -0.25};
  g.s0 = -hs;
  g.band = 1;
  return g;
}

DualField random_field(const Grid3& g, std::mt19937_64& rng, double amp) {
  DualField f = DualField::zeros(g);
  for (std::size_t q = 0; q < f.s.size(); ++q) {
    f.x1[q] = tu::uniform(rng, -amp, amp);
    f.x2[q] = tu::uniform(rng, -amp, amp);
    f.s[q] = tu::uniform(rng, -amp, amp);
  }
  return f;
}

}  // namespace

TEST_CASE("pair constraint bounds follow the block length") {
  const TransportModel urban = TransportModel::urban(3.0, 0.5);
  const TransportModel branched = TransportModel::branched(0.4);
  const double hs = 0.25;
  CHECK(make_pair_constraint(2, 2, hs, urban).bound ==
        doctest::Approx(std::min(hs + 0.5, 3.0 * hs)));
  CHECK(make_pair_constraint(0, 3, hs, urban).bound == doctest::Approx(std::min(1.5, 3.0)));
  CHECK(make_pair_constraint(1, 2, hs, branched).bound == doctest::Approx(std::pow(0.5, 0.6)));
  CHECK_THROWS_AS(make_pair_constraint(3, 1, hs, urban), invalid_parameter);
}

TEST_CASE("project_pair closed form") {
  const double hs = 1.0;
  SUBCASE("feasible column is unchanged") {
    std::vector<Vec2> col = {{0.1, 0}, {-0.1, 0}, {0.2, 0.1}};
    auto out = project_pair(col, {0, 2, 1.0}, hs);
    for (int l = 0; l < 3; ++l) CHECK(out[l] == col[l]);
  }
  SUBCASE("two entries (1,0) against bound 1 halve") {
    std::vector<Vec2> col = {{1, 0}, {1, 0}};
    auto out = project_pair(col, {0, 1, 1.0}, hs);
    CHECK(out[0].x == doctest::Approx(0.5));
    CHECK(out[1].x == doctest::Approx(0.5));
    Vec2 S = hs * (out[0] + out[1]);
    CHECK(norm(S) == doctest::Approx(1.0));
  }
}

TEST_CASE("project_pair agrees with the bisection oracle on 1000 random columns") {
  auto rng = tu::rng(5150);
  for (int trial = 0; trial < 1000; ++trial) {
    const int p = 1 + static_cast<int>(tu::uniform(rng, 1.0, 8.99));
    const double hs = tu::uniform(rng, 0.05, 1.5);
    const int l1 = static_cast<int>(tu::uniform(rng, 0.0, p - 0.01));
    const int l2 = l1 + static_cast<int>(tu::uniform(rng, 0.0, p - l1 + 0.99));
    std::vector<Vec2> col(p + 1);
    for (auto& v : col) v = {tu::uniform(rng, -2, 2), tu::uniform(rng, -2, 2)};
    PairConstraint pc{l1, std::min(l2, p), tu::uniform(rng, 0.0, 1.5)};
    auto closed = project_pair(col, pc, hs);
    auto oracle = tu::project_pair_bisection(col, pc, hs);
    for (std::size_t l = 0; l < col.size(); ++l) {
      CHECK(closed[l].x == doctest::Approx(oracle[l].x).epsilon(1e-10));
      CHECK(closed[l].y == doctest::Approx(oracle[l].y).epsilon(1e-10));
    }
  }
}

TEST_CASE("project_pair is idempotent, non-expansive, and lands on the set") {
  auto rng = tu::rng(7011);
  for (int trial = 0; trial < 200; ++trial) {
    const double hs = tu::uniform(rng, 0.05, 1.0);
    const int p = 6;
    PairConstraint pc{1, 4, tu::uniform(rng, 0.0, 2.0)};
    std::vector<Vec2> a(p + 1), b(p + 1);
    for (auto& v : a) v = {tu::uniform(rng, -3, 3), tu::uniform(rng, -3, 3)};
    for (auto& v : b) v = {tu::uniform(rng, -3, 3), tu::uniform(rng, -3, 3)};
    auto pa = project_pair(a, pc, hs);
    auto ppa = project_pair(pa, pc, hs);
    Vec2 S{0, 0};
    double before = 0, after = 0;
    auto pb = project_pair(b, pc, hs);
    for (int l = 0; l <= p; ++l) {
      CHECK(norm(ppa[l] - pa[l]) <= 1e-12);
      before += dot(a[l] - b[l], a[l] - b[l]);
      after += dot(pa[l] - pb[l], pa[l] - pb[l]);
    }
    for (int l = pc.l1; l <= pc.l2; ++l) S += hs * pa[l];
    CHECK(norm(S) <= pc.bound + 1e-12);
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("pointwise projection for the urban dual") {
  Grid3 g = tiny_grid(2, 2, 3, 0.5);
  DualField f = DualField::zeros(g);
  f.x1[0] = 6.0;  // |phi_x| = 6 > a = 3
  f.s[1] = -3.0;
  f.x1[2] = 1.0;
  f.x2[2] = 1.0;
  DualField out = project_pointwise_k1(f, 3.0);
  CHECK(out.x1[0] == doctest::Approx(3.0));
  CHECK(out.s[1] == 0.0);
  CHECK(out.x1[2] == 1.0);
  CHECK(out.x2[2] == 1.0);
  CHECK_THROWS_AS(project_pointwise_k1(f, 1.0), invalid_parameter);
}

TEST_CASE("project_K leaves feasible fields untouched") {
  Grid3 g = tiny_grid(2, 2, 6, 0.25);
  const TransportModel model = TransportModel::urban(2.0, 0.4);
  auto rng = tu::rng(31);
  DualField f = random_field(g, rng, 0.02);
  for (auto& v : f.s) v = std::abs(v);
  ProjectKResult res = project_K(f, model, g, 1e-6, 50);
  CHECK(res.report.converged);
  CHECK(res.report.cycles == 1);
  CHECK(res.report.violation == 0.0);
  for (std::size_t q = 0; q < f.s.size(); ++q) {
    CHECK(res.phi.x1[q] == f.x1[q]);
    CHECK(res.phi.x2[q] == f.x2[q]);
    CHECK(res.phi.s[q] == f.s[q]);
  }
}

TEST_CASE("project_K with a single active pair equals project_pair") {
  Grid3 g = tiny_grid(2, 2, 5, 0.5);
  const TransportModel model = TransportModel::branched(0.3);
  DualField f = DualField::zeros(g);
  // inflate one column block so exactly one pair constraint is active
  const int col = g.col(1, 1);
  const PairConstraint pc = make_pair_constraint(1, 3, g.hs, model);
  std::vector<Vec2> column(g.p + 1, Vec2{0, 0});
  for (int l = 1; l <= 3; ++l) column[l] = {0.9 * pc.bound / g.hs / 3.0, 0.0};
  // scale so the block sum slightly exceeds the bound but single layers stay ok
  const double scale = 1.2;
  for (int l = 0; l <= g.p; ++l) {
    f.x1[static_cast<std::size_t>(l) * g.ncols() + col] = scale * column[l].x;
    column[l] = scale * column[l];
  }
  REQUIRE(norm(g.hs * (column[1] + column[2] + column[3])) > pc.bound);
  REQUIRE(g.hs * norm(column[1]) < make_pair_constraint(1, 1, g.hs, model).bound);

  ProjectKResult res = project_K(f, model, g, 1e-9, 50);
  auto expect = project_pair(column, pc, g.hs);
  for (int l = 0; l <= g.p; ++l) {
    CHECK(res.phi.x1[static_cast<std::size_t>(l) * g.ncols() + col] ==
          doctest::Approx(expect[l].x).epsilon(1e-8));
  }
  CHECK(res.report.violation <= 1e-9);
}

TEST_CASE("single-layer pair constraint caps the pointwise norm for branched") {
  Grid3 g = tiny_grid(1, 1, 7, 0.2);
  const TransportModel model = TransportModel::branched(0.35);
  auto rng = tu::rng(77);
  DualField f = random_field(g, rng, 4.0);
  ProjectKResult res = project_K(f, model, g, 1e-7, 200);
  const double cap = std::pow(g.hs, -model.eps) + 1e-6;
  for (std::size_t q = 0; q < f.s.size(); ++q) {
    CHECK(std::sqrt(res.phi.x1[q] * res.phi.x1[q] + res.phi.x2[q] * res.phi.x2[q]) <= cap);
  }
}

TEST_CASE("project_K violation report comes from a full rescan") {
  Grid3 g = tiny_grid(2, 1, 6, 0.3);
  const TransportModel model = TransportModel::urban(2.5, 0.3);
  auto rng = tu::rng(88);
  for (int trial = 0; trial < 5; ++trial) {
    DualField f = random_field(g, rng, 2.0);
    ProjectKResult res = project_K(f, model, g, 1e-6, 100);
    CHECK(res.report.converged);
    // independent rescan of every constraint family
    double viol = 0.0;
    for (std::size_t q = 0; q < f.s.size(); ++q) {
      viol = std::max(viol, -res.phi.s[q]);
      viol = std::max(
          viol, std::sqrt(res.phi.x1[q] * res.phi.x1[q] + res.phi.x2[q] * res.phi.x2[q]) -
                    model.a);
    }
    const int C = g.ncols();
    for (int col = 0; col < C; ++col) {
      for (int l1 = 0; l1 <= g.p; ++l1) {
        Vec2 S{0, 0};
        for (int l2 = l1; l2 <= g.p; ++l2) {
          S += g.hs * Vec2{res.phi.x1[static_cast<std::size_t>(l2) * C + col],
                           res.phi.x2[static_cast<std::size_t>(l2) * C + col]};
          viol = std::max(viol, norm(S) - make_pair_constraint(l1, l2, g.hs, model).bound);
        }
      }
    }
    CHECK(viol <= 1e-6 + 1e-12);
    CHECK(viol == doctest::Approx(res.report.violation).epsilon(1e-9));
  }
}

TEST_CASE("Dykstra matches the dense ADMM projection oracle on 1x1x8 grids") {
  Grid3 g = tiny_grid(1, 1, 8, 0.25);
  auto rng = tu::rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const bool urban = trial % 2 == 0;
    const TransportModel model =
        urban ? TransportModel::urban(1.5 + 0.1 * (trial % 7), 0.2 + 0.05 * (trial % 5))
              : TransportModel::branched(0.15 + 0.05 * (trial % 9));
    DualField f = random_field(g, rng, 1.5);
    ProjectKResult dyk = project_K(f, model, g, 1e-10, 2000);
    tu::DenseProjectionOracle oracle{g, model};
    DualField dense = oracle.project(f);
    CHECK(tu::field_distance(dyk.phi, dense) <= 1e-6);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("Dykstra distance to the dense projection decreases across cycles") {
  Grid3 g = tiny_grid(1, 1, 8, 0.25);
  auto rng = tu::rng(9090);
  for (int trial = 0; trial < 5; ++trial) {
    const TransportModel model =
        trial % 2 ? TransportModel::branched(0.3) : TransportModel::urban(2.0, 0.35);
    DualField f = random_field(g, rng, 1.5);
    tu::DenseProjectionOracle oracle{g, model};
    DualField dense = oracle.project(f);
    double prev = 1e300;
    for (int cycles = 1; cycles <= 8; ++cycles) {
      DykstraOptions opts;
      opts.tol = 1e-14;
      opts.movement_tol = 1e-30;  // never met: forces exactly `cycles` sweeps
      opts.max_cycles = cycles;
      DykstraProjector proj(g, model, opts);
      DualField x = f;
      proj.project(x);
      const double d = tu::field_distance(x, dense);
      CHECK(d <= prev + 1e-10);
      prev = d;
    }
  }
}

TEST_CASE("corrections plus iterate reconstruct the pre-projection input") {
  Grid3 g = tiny_grid(2, 2, 5, 0.4);
  const TransportModel model = TransportModel::urban(2.0, 0.25);
  auto rng = tu::rng(404);
  DualField f = random_field(g, rng, 1.0);
  DykstraOptions opts;
  opts.tol = 1e-8;
  opts.max_cycles = 200;
  DykstraProjector proj(g, model, opts);
  DualField x = f;
  proj.project(x);
  DualField back = proj.add_corrections(x);
  for (std::size_t q = 0; q < f.s.size(); ++q) {
    CHECK(back.x1[q] == doctest::Approx(f.x1[q]).epsilon(1e-10));
    CHECK(back.x2[q] == doctest::Approx(f.x2[q]).epsilon(1e-10));
    CHECK(back.s[q] == doctest::Approx(f.s[q]).epsilon(1e-10));
  }
}

TEST_CASE("dyadic scheme only constrains power-of-two block lengths") {
  kern::PairScheme full, dyadic;
  full.build(7, 0.25, false, true, 0.3, 2.0);
  dyadic.build(7, 0.25, true, true, 0.3, 2.0);
  CHECK(full.total_pairs == 36);
  int dy = 0;
  for (int k = 1; k <= 8; ++k)
    if ((k & (k - 1)) == 0) dy += 8 - k + 1;
  CHECK(dyadic.total_pairs == dy);
  CHECK(dyadic.active[1]);
  CHECK(dyadic.active[4]);
  CHECK(!dyadic.active[3]);
}
