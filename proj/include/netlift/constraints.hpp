#pragma once

#include <vector>

#include "netlift/kernels.hpp"
#include "netlift/lift.hpp"

namespace netlift {

// Dual variable: two spatial components and one s-component per grid node,
// stored layer-major like LiftedField.
struct DualField {
  Grid3 grid;
  std::vector<double> x1, x2, s;

  static DualField zeros(const Grid3& g) {
    DualField f;
    f.grid = g;
    f.x1.assign(g.nnodes(), 0.0);
    f.x2.assign(g.nnodes(), 0.0);
    f.s.assign(g.nnodes(), 0.0);
    return f;
  }
};

// One interval constraint on a single column: the hs-weighted sum of the
// spatial dual over layers [l1, l2] has norm at most `bound`.
struct PairConstraint {
  int l1 = 0;
  int l2 = 0;
  double bound = 0.0;
};

PairConstraint make_pair_constraint(int l1, int l2, double hs, const TransportModel& model);

// Exact Euclidean projection of one column onto a single pair constraint.
std::vector<Vec2> project_pair(std::vector<Vec2> column, const PairConstraint& pc, double hs);

// Per-node projection onto {phi_s >= 0, |phi_x| <= a}.
DualField project_pointwise_k1(DualField phi, double a);

struct DykstraOptions {
  double tol = 1e-6;       // max constraint violation accepted
  int max_cycles = 50;
  // Movement criterion: also require the per-cycle correction change to drop
  // below this before stopping. 0 disables it: the iterate is accepted as
  // soon as it is feasible, the cheap inexact prox used inside the solver
  // loop. The one-shot projection keeps it on to converge to the true
  // projection.
  double movement_tol = 0.0;
  bool dyadic = false;
  kern::KernelVariant kernels = kern::KernelVariant::Auto;
};

struct DykstraReport {
  int cycles = 0;
  double violation = 0.0;
  double movement = 0.0;  // largest correction change in the final cycle
  bool converged = false;
};

// Cyclic Dykstra projection onto the dual constraint set. Family order is
// fixed: {phi_s >= 0}, the pointwise ball (urban only), then pair constraints
// sorted by (l1, l2). Correction buffers persist across calls so repeated
// projections inside an outer iteration warm-start.
class DykstraProjector {
 public:
  DykstraProjector(const Grid3& g, const TransportModel& model, DykstraOptions opts);

  DykstraReport project(DualField& phi);

  // max constraint violation of phi without modifying it
  double violation(const DualField& phi);
  double violation_bounded(const DualField& phi, double bail_above);

  void set_options(const DykstraOptions& opts) { opts_ = opts; }
  const DykstraOptions& options() const { return opts_; }

  void reset_corrections();

  const kern::PairScheme& scheme() const { return scheme_; }

  // Dykstra bookkeeping invariant: iterate + sum of corrections equals the
  // pre-projection input. Returns the reconstructed input (test support).
  DualField add_corrections(const DualField& phi) const;

 private:
  void apply_pair_corrections(DualField& phi, double sign) const;

  Grid3 grid_;
  TransportModel model_;
  DykstraOptions opts_;
  const kern::KernelOps* ops_;
  kern::PairScheme scheme_;
  std::vector<double> corr_pairs_;   // per (pair, comp, col)
  std::vector<double> corr_s_;       // per node
  std::vector<double> corr_ball1_, corr_ball2_;  // per node, urban only
  std::vector<double> scratch_d_, scratch_s_, scratch_prefix_;
};

// One-shot projection (cold start) converging to the Euclidean projection:
// runs until both the violation and the cycle movement are below tol.
struct ProjectKResult {
  DualField phi;
  DykstraReport report;
};
ProjectKResult project_K(const DualField& phi, const TransportModel& model, const Grid3& g,
                         double tol, int max_cycles,
                         kern::KernelVariant kernels = kern::KernelVariant::Auto);

}  // namespace netlift
