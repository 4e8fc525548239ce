#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "netlift/model.hpp"
#include "netlift/wasserstein.hpp"
#include "support/test_util.hpp"

using namespace netlift;
namespace tu = netlift::testutil;

namespace {

TransportGraph single_edge(Vec2 a, Vec2 b, double w) {
  TransportGraph g;
  g.vertices = {a, b};
  g.edges = {{0, 1, w}};
  return g;
}

}  // namespace

TEST_CASE("urban graph cost") {
  CHECK(graph_cost_urban(single_edge({0, 0}, {1, 0}, 1.0), 0.5, 2.0) == doctest::Approx(1.5));
  CHECK(graph_cost_urban(single_edge({0, 0}, {2, 0}, 0.1), 0.5, 3.0) == doctest::Approx(0.6));
  CHECK(graph_cost_urban(TransportGraph{}, 0.5, 2.0) == 0.0);
  CHECK(graph_cost_urban(single_edge({0, 0}, {1, 0}, 0.0), 0.5, 2.0) == 0.0);
  CHECK_THROWS_AS(graph_cost_urban(TransportGraph{}, 0.5, 1.0), invalid_parameter);
  CHECK_THROWS_AS(graph_cost_urban(TransportGraph{}, -1.0, 2.0), invalid_parameter);
}

TEST_CASE("branched graph cost") {
  CHECK(graph_cost_branched(single_edge({0, 0}, {1, 0}, 1.0), 0.37) == doctest::Approx(1.0));
  CHECK(graph_cost_branched(single_edge({0, 0}, {1, 0}, 4.0), 0.5) == doctest::Approx(2.0));
  // merging parallel mass is cheaper: one weight-2 edge vs two unit edges
  TransportGraph two;
  two.vertices = {{0, 0}, {0, 1}};
  two.edges = {{0, 1, 1.0}, {0, 1, 1.0}};
  CHECK(graph_cost_branched(two, 0.5) == doctest::Approx(2.0));
  CHECK(graph_cost_branched(single_edge({0, 0}, {0, 1}, 2.0), 0.5) ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(graph_cost_branched(single_edge({0, 0}, {1, 0}, 0.0), 0.5) == 0.0);
  CHECK_THROWS_AS(graph_cost_branched(TransportGraph{}, 0.0), invalid_parameter);
  CHECK_THROWS_AS(graph_cost_branched(TransportGraph{}, 1.0), invalid_parameter);
}

TEST_CASE("urban cost sits under both linear envelopes edgewise") {
  auto g = tu::rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const double w = tu::uniform(g, 0.0, 3.0);
    const double len = tu::uniform(g, 0.1, 2.0);
    const double a = tu::uniform(g, 1.01, 6.0);
    const double eps = tu::uniform(g, 0.001, 2.0);
    const double c = graph_cost_urban(single_edge({0, 0}, {len, 0}, w), eps, a);
    CHECK(c <= a * w * len + 1e-12);
    CHECK(c <= (w + eps) * len + 1e-12);
  }
}

TEST_CASE("branched cost is 1-homogeneous in lengths and concave per weight") {
  auto g = tu::rng(18);
  for (int trial = 0; trial < 30; ++trial) {
    const double eps = tu::uniform(g, 0.05, 0.95);
    TransportGraph graph;
    graph.vertices = {{0, 0}, {tu::uniform(g, 0.5, 2.0), tu::uniform(g, 0.0, 1.0)}, {3, 1}};
    graph.edges = {{0, 1, tu::uniform(g, 0.1, 2.0)}, {1, 2, tu::uniform(g, 0.1, 2.0)}};
    const double base = graph_cost_branched(graph, eps);
    const double lam = tu::uniform(g, 0.3, 2.5);
    TransportGraph scaled = graph;
    for (auto& v : scaled.vertices) v = lam * v;
    CHECK(graph_cost_branched(scaled, eps) == doctest::Approx(lam * base));

    // midpoint concavity in one edge weight
    const double w1 = tu::uniform(g, 0.1, 2.0), w2 = tu::uniform(g, 0.1, 2.0);
    auto with_w = [&](double w) {
      TransportGraph h = graph;
      h.edges[0].weight = w;
      return graph_cost_branched(h, eps);
    };
    CHECK(with_w(0.5 * (w1 + w2)) >= 0.5 * (with_w(w1) + with_w(w2)) - 1e-12);
  }
}

TEST_CASE("divergence residual") {
  const Vec2 p{0, 0}, q{1, 0};
  TransportGraph g = single_edge(p, q, 1.0);
  SignedAtomMeasure exact{{{p, 1.0}, {q, -1.0}}};
  CHECK(divergence_residual(g, exact) == doctest::Approx(0.0));
  SignedAtomMeasure off{{{p, 1.0}, {q, -0.5}}};
  CHECK(divergence_residual(g, off) == doctest::Approx(0.5));

  // two half-weight branches merging into one unit trunk
  TransportGraph y;
  y.vertices = {{-1, 1}, {1, 1}, {0, 0}, {0, -1}};
  y.edges = {{0, 2, 0.5}, {1, 2, 0.5}, {2, 3, 1.0}};
  SignedAtomMeasure target{{{{-1, 1}, 0.5}, {{1, 1}, 0.5}, {{0, -1}, -1.0}}};
  CHECK(divergence_residual(y, target) == doctest::Approx(0.0));

  // unmatched target atom counts fully
  SignedAtomMeasure stray{{{p, 1.0}, {q, -1.0}, {{5, 5}, 0.25}}};
  CHECK(divergence_residual(g, stray) == doctest::Approx(0.25));
}

TEST_CASE("wasserstein1 basics") {
  SignedAtomMeasure a{{{{0, 0}, 1.0}}};
  SignedAtomMeasure b{{{{3, 4}, 1.0}}};
  CHECK(wasserstein1(a, b) == doctest::Approx(5.0));

  // discretized line measures at vertical distance 1, matched columns
  const int k = 8;
  const double ell = 2.0;
  SignedAtomMeasure bottom, top;
  for (int i = 0; i < k; ++i) {
    const double x = (i + 0.5) * ell / k;
    bottom.atoms.push_back({{x, 0.0}, ell / k});
    top.atoms.push_back({{x, 1.0}, ell / k});
  }
  CHECK(wasserstein1(bottom, top) == doctest::Approx(2.0));

  SignedAtomMeasure unbalanced{{{{0, 0}, 2.0}}};
  CHECK_THROWS_AS(wasserstein1(unbalanced, b), infeasible_error);
}

TEST_CASE("wasserstein1 equals the brute-force transport polytope minimum") {
  auto g = tu::rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    SignedAtomMeasure mu_p, mu_m;
    tu::random_measures(g, 3, 3, mu_p, mu_m);
    const double exact = tu::brute_force_w1(mu_p, mu_m);
    CHECK(wasserstein1(mu_p, mu_m) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("conservative graphs cost at least W1") {
  auto g = tu::rng(4242);
  for (int trial = 0; trial < 25; ++trial) {
    SignedAtomMeasure mu_p, mu_m;
    tu::random_measures(g, 3, 3, mu_p, mu_m);
    // two-stage feasible flow through random relay points
    SignedAtomMeasure mid;
    {
      const double total = mu_p.total();
      const double c1 = tu::uniform(g, 0.2, 0.8) * total;
      mid.atoms = {{{tu::uniform(g, 0, 2), tu::uniform(g, 0, 2)}, c1},
                   {{tu::uniform(g, 0, 2), tu::uniform(g, 0, 2)}, total - c1}};
    }
    TransportGraph graph;
    auto add_stage = [&](const SignedAtomMeasure& from, const SignedAtomMeasure& to) {
      const int base = static_cast<int>(graph.vertices.size());
      for (const auto& at : from.atoms) graph.vertices.push_back(at.p);
      const int tbase = static_cast<int>(graph.vertices.size());
      for (const auto& at : to.atoms) graph.vertices.push_back(at.p);
      std::vector<double> s, d;
      for (const auto& at : from.atoms) s.push_back(at.value);
      for (const auto& at : to.atoms) d.push_back(at.value);
      std::vector<std::vector<double>> cost(s.size(), std::vector<double>(d.size(), 0.0));
      std::vector<int> order;
      for (std::size_t c = 0; c < s.size() * d.size(); ++c) order.push_back(static_cast<int>(c));
      std::vector<std::vector<double>> flow;
      tu::greedy_plan_cost(s, d, cost, order, &flow);
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
          if (flow[i][j] > 0)
            graph.edges.push_back({base + static_cast<int>(i), tbase + static_cast<int>(j),
                                   flow[i][j]});
    };
    add_stage(mu_p, mid);
    add_stage(mid, mu_m);
    graph = canonical(graph);

    SignedAtomMeasure net = mu_p;
    for (const auto& at : mu_m.atoms) net.atoms.push_back({at.p, -at.value});
    CHECK(divergence_residual(graph, canonical(net)) < 1e-9);

    const double w1 = wasserstein1(mu_p, mu_m);
    CHECK(graph_cost_urban(graph, 0.25, 3.0) >= w1 - 1e-9);
    CHECK(graph_cost_branched(graph, 0.3) >= w1 - 1e-9);
  }
}

TEST_CASE("boundary measure canonical form") {
  BoundaryMeasure m;
  m.atoms = {{2.0, 0.5}, {1.0, 0.25}, {2.0, 0.5}};
  m = canonical(m, 6.0);
  REQUIRE(m.atoms.size() == 2);
  CHECK(m.atoms[0].t == 1.0);
  CHECK(m.atoms[1].w == 1.0);
  BoundaryMeasure bad;
  bad.atoms = {{-0.5, 1.0}};
  CHECK_THROWS_AS(validate(bad, 6.0), invalid_parameter);
  BoundaryMeasure zero;
  zero.atoms = {{0.5, 0.0}};
  CHECK_THROWS_AS(validate(zero, 6.0), invalid_parameter);
}

TEST_CASE("scenario validation") {
  Scenario sc;
  sc.width = 2.0;
  sc.height = 1.0;
  sc.model = TransportModel::urban(2.0, 0.5);
  sc.sources.atoms = {{1.0, 1.0}};
  sc.sinks.atoms = {{4.0, 1.0}};
  CHECK_NOTHROW(validate(sc));
  sc.sinks.atoms = {{4.0, 0.75}};
  CHECK_THROWS_AS(validate(sc), infeasible_error);
  CHECK_THROWS_AS(TransportModel::urban(0.9, 0.5), invalid_parameter);
  CHECK_THROWS_AS(TransportModel::branched(1.2), invalid_parameter);
}

TEST_CASE("scenario boundary parameterization is a left inverse") {
  Scenario sc;
  sc.width = 2.0;
  sc.height = 1.0;
  for (double t : {0.0, 0.5, 1.9999, 2.0, 2.5, 3.0, 3.01, 4.99, 5.0, 5.5}) {
    CHECK(sc.boundary_arclength(sc.boundary_point(t)) == doctest::Approx(t).epsilon(1e-12));
  }
  // interior point projects to the nearest edge, corner ties take smaller t
  CHECK(sc.boundary_arclength({1.0, 0.25}) == doctest::Approx(1.0));
  CHECK(sc.boundary_arclength({0.25, 0.25}) == doctest::Approx(0.25));  // bottom beats left
}

TEST_CASE("transport graph canonical form") {
  TransportGraph g;
  g.vertices = {{0, 0}, {1e-12, 0}, {1, 0}};
  g.edges = {{0, 2, 0.5}, {1, 2, 0.5}, {2, 0, 0.25}, {0, 1, 3.0}};
  TransportGraph c = canonical(g);
  CHECK(c.vertices.size() == 2);  // first two merge
  REQUIRE(c.edges.size() == 1);   // parallel edges combine, self-loop dropped
  CHECK(c.edges[0].weight == doctest::Approx(0.75));
}
