#pragma once

#include <vector>

#include "netlift/model.hpp"

namespace netlift {

// One arc of an optimal transport plan between atomic measures.
struct PlanArc {
  int source = 0;  // index into the source atom list
  int sink = 0;    // index into the sink atom list
  double mass = 0.0;
};

struct TransportPlan {
  double cost = 0.0;
  std::vector<PlanArc> arcs;
};

// Exact Wasserstein-1 between non-negative atomic measures of equal total
// mass, solved as a min-cost bipartite flow by successive shortest paths.
// Throws infeasible_error when the masses do not balance (relative 1e-12).
TransportPlan wasserstein1_plan(const SignedAtomMeasure& mu_plus,
                                const SignedAtomMeasure& mu_minus);

double wasserstein1(const SignedAtomMeasure& mu_plus, const SignedAtomMeasure& mu_minus);

// The optimal plan realized as a transport path: one straight edge per plan arc.
TransportGraph plan_graph(const SignedAtomMeasure& mu_plus, const SignedAtomMeasure& mu_minus,
                          const TransportPlan& plan);

}  // namespace netlift
