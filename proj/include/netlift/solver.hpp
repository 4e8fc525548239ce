#pragma once

#include <memory>
#include <vector>

#include "netlift/constraints.hpp"
#include "netlift/lift.hpp"

namespace netlift {

struct SolverOptions {
  double tau = 0.0;           // 0: derive both steps from step_factor / L
  double sigma = 0.0;
  double step_factor = 0.99;
  double theta = 1.0;
  int max_iters = 20000;
  double stop_tol = 1e-5;
  // In-loop projections run a small warm-started budget (inexact prox); the
  // final dual is re-projected strictly before the value is reported.
  DykstraOptions dykstra = [] {
    DykstraOptions d;
    d.max_cycles = 4;
    return d;
  }();
  int log_every = 1;
  bool log_energy = false;  // also record the saddle value per log entry (slow)
};

// Operator norm bound of the forward-difference gradient.
double grad_norm_squared(const Grid3& g);

// tau/sigma resolved against the step bound tau*sigma*L^2 <= 1.
struct ResolvedSteps {
  double tau = 0.0;
  double sigma = 0.0;
};
ResolvedSteps resolve_steps(const SolverOptions& opts, const Grid3& g);

// Forward-difference gradient, zero at the last index of each direction.
DualField grad(const LiftedField& v, const Grid3& g);

// Algebraic adjoint of grad under the unweighted Euclidean inner products.
std::vector<double> grad_adjoint(const DualField& phi, const Grid3& g);

// Saddle value <phi, D v> restricted to difference terms whose edge meets the
// closed domain rectangle, scaled by the cell volume h1*h2*hs.
double saddle_value(const LiftedField& v, const DualField& phi, const Grid3& g);

struct LogEntry {
  int iter = 0;
  double residual = 0.0;
  double dykstra_violation = 0.0;
  int dykstra_cycles = 0;
  double energy = 0.0;  // only when log_energy is set
};

struct SolveResult {
  LiftedField v;
  DualField phi;
  double primal_value = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  double dykstra_violation = 0.0;
  std::vector<LogEntry> log;
};

// Primal-dual iteration state; step() performs one descent/overrelax/ascent
// cycle with the dual projection warm-started across iterations.
class PdSolver {
 public:
  PdSolver(const LiftedProblem& pb, const TransportModel& model, SolverOptions opts);

  void step();
  SolveResult run();

  const LiftedField& v() const { return v_; }
  const DualField& phi() const { return phi_; }
  double residual() const { return residual_; }
  double dykstra_violation() const { return dyk_violation_; }
  int dykstra_cycles() const { return dyk_cycles_; }
  int iterations() const { return iters_; }
  double value() const;  // current saddle value

 private:
  void adjoint_into(std::vector<double>& out, const DualField& phi) const;
  void ascent(DualField& phi, const std::vector<double>& vbar) const;

  Grid3 grid_;
  TransportModel model_;
  SolverOptions opts_;
  double tau_ = 0.0, sigma_ = 0.0;
  const kern::KernelOps* ops_;
  LiftedField v_;
  std::vector<double> v_prev_, vbar_, adj_;
  DualField phi_;
  DualField phi_prev_;
  std::unique_ptr<DykstraProjector> projector_;
  double residual_ = 0.0;
  double dyk_violation_ = 0.0;
  int dyk_cycles_ = 0;
  int iters_ = 0;
};

// Builds the lifted problem for the scenario and iterates to convergence.
SolveResult solve(const Scenario& sc, int n, int m, int p, int band,
                  const SolverOptions& opts);
SolveResult solve(const LiftedProblem& pb, const TransportModel& model,
                  const SolverOptions& opts);

}  // namespace netlift
