#include "netlift/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netlift {

PairConstraint make_pair_constraint(int l1, int l2, double hs, const TransportModel& model) {
  if (l1 > l2) throw invalid_parameter("pair constraint requires l1 <= l2");
  const double L = (l2 - l1 + 1) * hs;
  const double c = model.kind == ModelKind::Urban ? std::min(L + model.eps, model.a * L)
                                                  : std::pow(L, 1.0 - model.eps);
  return {l1, l2, c};
}

std::vector<Vec2> project_pair(std::vector<Vec2> column, const PairConstraint& pc, double hs) {
  if (pc.bound < 0.0) throw invalid_parameter("pair constraint bound must be >= 0");
  const int k = pc.l2 - pc.l1 + 1;
  Vec2 S{0.0, 0.0};
  for (int l = pc.l1; l <= pc.l2; ++l) S += hs * column[l];
  const double nrm = norm(S);
  if (nrm <= pc.bound) return column;
  const Vec2 shift = (1.0 / (hs * k)) * (S - (pc.bound / nrm) * S);
  for (int l = pc.l1; l <= pc.l2; ++l) column[l] -= shift;
  return column;
}

DualField project_pointwise_k1(DualField phi, double a) {
  if (!(a > 1.0)) throw invalid_parameter("pointwise ball requires a > 1");
  for (std::size_t q = 0; q < phi.s.size(); ++q) {
    phi.s[q] = std::max(phi.s[q], 0.0);
    const double nrm = std::sqrt(phi.x1[q] * phi.x1[q] + phi.x2[q] * phi.x2[q]);
    if (nrm > a) {
      const double r = a / nrm;
      phi.x1[q] *= r;
      phi.x2[q] *= r;
    }
  }
  return phi;
}

DykstraProjector::DykstraProjector(const Grid3& g, const TransportModel& model,
                                   DykstraOptions opts)
    : grid_(g), model_(model), opts_(opts), ops_(&kern::get_kernels(opts.kernels)) {
  if (!(opts_.tol > 0.0)) throw invalid_parameter("dykstra tol must be > 0");
  scheme_.build(g.p, g.hs, opts_.dyadic, model.kind == ModelKind::Urban, model.eps, model.a);
  const int C = g.ncols();
  corr_pairs_.assign(static_cast<std::size_t>(scheme_.total_pairs) * 2 * C, 0.0);
  corr_s_.assign(g.nnodes(), 0.0);
  if (model.kind == ModelKind::Urban) {
    corr_ball1_.assign(g.nnodes(), 0.0);
    corr_ball2_.assign(g.nnodes(), 0.0);
  }
  scratch_d_.assign(static_cast<std::size_t>(g.nlayers()) * 2 * C, 0.0);
  scratch_s_.assign(static_cast<std::size_t>(4) * C, 0.0);
  scratch_prefix_.assign(static_cast<std::size_t>(g.nlayers() + 1) * 2 * C, 0.0);
}

void DykstraProjector::reset_corrections() {
  std::fill(corr_pairs_.begin(), corr_pairs_.end(), 0.0);
  std::fill(corr_s_.begin(), corr_s_.end(), 0.0);
  std::fill(corr_ball1_.begin(), corr_ball1_.end(), 0.0);
  std::fill(corr_ball2_.begin(), corr_ball2_.end(), 0.0);
}

double DykstraProjector::violation(const DualField& phi) {
  return violation_bounded(phi, std::numeric_limits<double>::infinity());
}

double DykstraProjector::violation_bounded(const DualField& phi, double bail_above) {
  const int C = grid_.ncols();
  double v = ops_->max_neg(phi.s.data(), phi.s.size());
  if (model_.kind == ModelKind::Urban)
    v = std::max(v, ops_->max_ball_excess(phi.x1.data(), phi.x2.data(), model_.a,
                                          phi.x1.size()));
  if (v > bail_above) return v;
  v = std::max(v, ops_->pair_violation(phi.x1.data(), phi.x2.data(), scheme_, C,
                                       scratch_prefix_.data(), bail_above));
  return v;
}

DykstraReport DykstraProjector::project(DualField& phi) {
  // warm start: continue from the carried corrections
  const std::size_t n = phi.s.size();
  const int C = grid_.ncols();
  for (std::size_t q = 0; q < n; ++q) phi.s[q] -= corr_s_[q];
  if (model_.kind == ModelKind::Urban) {
    for (std::size_t q = 0; q < n; ++q) phi.x1[q] -= corr_ball1_[q];
    for (std::size_t q = 0; q < n; ++q) phi.x2[q] -= corr_ball2_[q];
  }
  apply_pair_corrections(phi, -1.0);

  // Feasibility alone is reached long before the iterate stops moving toward
  // the projection; movement_tol > 0 additionally demands a Dykstra fixed
  // point (used by the one-shot projection and its oracle comparisons).
  DykstraReport rep;
  for (int cycle = 1; cycle <= opts_.max_cycles; ++cycle) {
    double moved = ops_->nonneg_dykstra(phi.s.data(), corr_s_.data(), n);
    if (model_.kind == ModelKind::Urban)
      moved = std::max(moved, ops_->ball_dykstra(phi.x1.data(), phi.x2.data(),
                                                 corr_ball1_.data(), corr_ball2_.data(),
                                                 model_.a, n));
    moved = std::max(moved, ops_->pair_sweep(phi.x1.data(), phi.x2.data(),
                                             corr_pairs_.data(), scheme_, C,
                                             scratch_d_.data(), scratch_s_.data()));
    rep.cycles = cycle;
    rep.movement = moved;
    const bool settled = opts_.movement_tol <= 0.0 || moved <= opts_.movement_tol;
    if (settled && cycle < opts_.max_cycles) {
      // cheap check: bails out as soon as some constraint exceeds tol
      rep.violation = violation_bounded(phi, opts_.tol);
      if (rep.violation <= opts_.tol) {
        rep.converged = true;
        break;
      }
    } else if (cycle == opts_.max_cycles) {
      rep.violation = violation(phi);
      rep.converged = settled && rep.violation <= opts_.tol;
    }
  }
  return rep;
}

// Adds sign * (expanded pair corrections) to phi.x via suffix sums: the total
// correction at layer l is, for each l1 <= l, the sum of block corrections
// q(l1, l2) over l2 >= l.
void DykstraProjector::apply_pair_corrections(DualField& phi, double sign) const {
  const int C = grid_.ncols();
  std::vector<double> acc1(C), acc2(C);
  for (int l1 = 0; l1 <= grid_.p; ++l1) {
    std::fill(acc1.begin(), acc1.end(), 0.0);
    std::fill(acc2.begin(), acc2.end(), 0.0);
    int slot = scheme_.offset[l1 + 1];  // one past the last slot of row l1
    for (int l = grid_.p; l >= l1; --l) {
      if (scheme_.active[l - l1 + 1]) {
        --slot;
        const double* q1 = corr_pairs_.data() + (static_cast<std::size_t>(slot) * 2) * C;
        const double* q2 = corr_pairs_.data() + (static_cast<std::size_t>(slot) * 2 + 1) * C;
        for (int col = 0; col < C; ++col) {
          acc1[col] += q1[col];
          acc2[col] += q2[col];
        }
      }
      double* r1 = phi.x1.data() + static_cast<std::size_t>(l) * C;
      double* r2 = phi.x2.data() + static_cast<std::size_t>(l) * C;
      for (int col = 0; col < C; ++col) {
        r1[col] += sign * acc1[col];
        r2[col] += sign * acc2[col];
      }
    }
  }
}

DualField DykstraProjector::add_corrections(const DualField& phi) const {
  DualField out = phi;
  for (std::size_t q = 0; q < out.s.size(); ++q) out.s[q] += corr_s_[q];
  if (model_.kind == ModelKind::Urban) {
    for (std::size_t q = 0; q < out.s.size(); ++q) {
      out.x1[q] += corr_ball1_[q];
      out.x2[q] += corr_ball2_[q];
    }
  }
  apply_pair_corrections(out, 1.0);
  return out;
}

ProjectKResult project_K(const DualField& phi, const TransportModel& model, const Grid3& g,
                         double tol, int max_cycles, kern::KernelVariant kernels) {
  DykstraOptions opts;
  opts.tol = tol;
  opts.max_cycles = max_cycles;
  opts.movement_tol = tol;
  opts.kernels = kernels;
  DykstraProjector proj(g, model, opts);
  ProjectKResult out;
  out.phi = phi;
  out.report = proj.project(out.phi);
  return out;
}

}  // namespace netlift
