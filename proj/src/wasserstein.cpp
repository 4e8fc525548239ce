#include "netlift/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netlift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TransportPlan wasserstein1_plan(const SignedAtomMeasure& mu_plus,
                                const SignedAtomMeasure& mu_minus) {
  const int k = static_cast<int>(mu_plus.atoms.size());
  const int l = static_cast<int>(mu_minus.atoms.size());
  double supply_total = 0.0, demand_total = 0.0;
  for (const auto& a : mu_plus.atoms) {
    if (!(a.value > 0.0)) throw invalid_parameter("wasserstein1: source atoms must be positive");
    supply_total += a.value;
  }
  for (const auto& a : mu_minus.atoms) {
    if (!(a.value > 0.0)) throw invalid_parameter("wasserstein1: sink atoms must be positive");
    demand_total += a.value;
  }
  const double scale = std::max({supply_total, demand_total, 1e-300});
  if (std::abs(supply_total - demand_total) > 1e-12 * scale)
    throw infeasible_error("wasserstein1: total masses do not balance");
  if (k == 0 || l == 0) return {};

  std::vector<std::vector<double>> cost(k, std::vector<double>(l));
  std::vector<std::vector<double>> flow(k, std::vector<double>(l, 0.0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < l; ++j) cost[i][j] = dist(mu_plus.atoms[i].p, mu_minus.atoms[j].p);

  std::vector<double> supply(k), demand(l);
  for (int i = 0; i < k; ++i) supply[i] = mu_plus.atoms[i].value;
  for (int j = 0; j < l; ++j) demand[j] = mu_minus.atoms[j].value;

  double remaining = supply_total;
  const double done_tol = 1e-15 * scale;
  while (remaining > done_tol) {
    // Bellman-Ford on the residual bipartite graph (backward arcs carry the
    // negated cost); desk-scale instances keep this cheap and it avoids any
    // potential bookkeeping.
    std::vector<double> ds(k, kInf), dt(l, kInf);
    std::vector<int> parent_of_sink(l, -1);  // source feeding this sink on the path
    std::vector<int> parent_of_src(k, -2);   // sink preceding this source (-1: root)
    for (int i = 0; i < k; ++i)
      if (supply[i] > done_tol) {
        ds[i] = 0.0;
        parent_of_src[i] = -1;
      }
    for (int round = 0; round < k + l + 1; ++round) {
      bool changed = false;
      for (int i = 0; i < k; ++i) {
        if (ds[i] == kInf) continue;
        for (int j = 0; j < l; ++j) {
          if (ds[i] + cost[i][j] < dt[j] - 1e-15) {
            dt[j] = ds[i] + cost[i][j];
            parent_of_sink[j] = i;
            changed = true;
          }
        }
      }
      for (int j = 0; j < l; ++j) {
        if (dt[j] == kInf) continue;
        for (int i = 0; i < k; ++i) {
          if (flow[i][j] <= 0.0) continue;
          if (dt[j] - cost[i][j] < ds[i] - 1e-15) {
            ds[i] = dt[j] - cost[i][j];
            parent_of_src[i] = j;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }

    int target = -1;
    double best = kInf;
    for (int j = 0; j < l; ++j)
      if (demand[j] > done_tol && dt[j] < best) { best = dt[j]; target = j; }
    if (target < 0) throw infeasible_error("wasserstein1: flow network disconnected");

    // bottleneck along the alternating path
    double push = demand[target];
    {
      int j = target;
      while (true) {
        const int i = parent_of_sink[j];
        if (parent_of_src[i] == -1) { push = std::min(push, supply[i]); break; }
        j = parent_of_src[i];
        push = std::min(push, flow[i][j]);
      }
    }
    push = std::min(push, remaining);
    {
      int j = target;
      while (true) {
        const int i = parent_of_sink[j];
        flow[i][j] += push;
        if (parent_of_src[i] == -1) { supply[i] -= push; break; }
        const int j2 = parent_of_src[i];
        flow[i][j2] -= push;
        j = j2;
      }
    }
    demand[target] -= push;
    remaining -= push;
  }

  TransportPlan plan;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < l; ++j)
      if (flow[i][j] > 0.0) {
        plan.arcs.push_back({i, j, flow[i][j]});
        plan.cost += flow[i][j] * cost[i][j];
      }
  return plan;
}

double wasserstein1(const SignedAtomMeasure& mu_plus, const SignedAtomMeasure& mu_minus) {
  return wasserstein1_plan(mu_plus, mu_minus).cost;
}

TransportGraph plan_graph(const SignedAtomMeasure& mu_plus, const SignedAtomMeasure& mu_minus,
                          const TransportPlan& plan) {
  TransportGraph g;
  const int k = static_cast<int>(mu_plus.atoms.size());
  for (const auto& a : mu_plus.atoms) g.vertices.push_back(a.p);
  for (const auto& a : mu_minus.atoms) g.vertices.push_back(a.p);
  for (const auto& arc : plan.arcs) g.edges.push_back({arc.source, k + arc.sink, arc.mass});
  return canonical(g);
}

}  // namespace netlift
