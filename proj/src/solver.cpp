#include "netlift/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace netlift {

double grad_norm_squared(const Grid3& g) {
  return 4.0 * (1.0 / (g.h1 * g.h1) + 1.0 / (g.h2 * g.h2) + 1.0 / (g.hs * g.hs));
}

ResolvedSteps resolve_steps(const SolverOptions& opts, const Grid3& g) {
  const double L2 = grad_norm_squared(g);
  ResolvedSteps st;
  if (opts.tau > 0.0 || opts.sigma > 0.0) {
    if (!(opts.tau > 0.0 && opts.sigma > 0.0))
      throw invalid_parameter("set both tau and sigma or neither");
    st.tau = opts.tau;
    st.sigma = opts.sigma;
  } else {
    if (!(opts.step_factor > 0.0 && opts.step_factor <= 1.0))
      throw invalid_parameter("step_factor must be in (0,1]");
    st.tau = st.sigma = opts.step_factor / std::sqrt(L2);
  }
  if (st.tau * st.sigma * L2 > 1.0 + 1e-12)
    throw invalid_parameter("step sizes violate tau*sigma*L^2 <= 1");
  return st;
}

DualField grad(const LiftedField& f, const Grid3& g) {
  DualField out = DualField::zeros(g);
  const int nx = g.nx(), ny = g.ny(), C = g.ncols();
  for (int l = 0; l <= g.p; ++l) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t q = g.node(i, j, l);
        if (i < g.n) out.x1[q] = (f.v[q + 1] - f.v[q]) / g.h1;
        if (j < g.m) out.x2[q] = (f.v[q + nx] - f.v[q]) / g.h2;
        if (l < g.p) out.s[q] = (f.v[q + C] - f.v[q]) / g.hs;
      }
    }
  }
  return out;
}

std::vector<double> grad_adjoint(const DualField& phi, const Grid3& g) {
  std::vector<double> out(g.nnodes(), 0.0);
  const int nx = g.nx(), ny = g.ny(), C = g.ncols();
  for (int l = 0; l <= g.p; ++l) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t q = g.node(i, j, l);
        double acc = 0.0;
        if (i > 0) acc += phi.x1[q - 1] / g.h1;
        if (i < g.n) acc -= phi.x1[q] / g.h1;
        if (j > 0) acc += phi.x2[q - nx] / g.h2;
        if (j < g.m) acc -= phi.x2[q] / g.h2;
        if (l > 0) acc += phi.s[q - C] / g.hs;
        if (l < g.p) acc -= phi.s[q] / g.hs;
        out[q] = acc;
      }
    }
  }
  return out;
}

double saddle_value(const LiftedField& f, const DualField& phi, const Grid3& g) {
  const int nx = g.nx(), ny = g.ny(), C = g.ncols();
  // trapezoidal transverse weights: nodes on the domain boundary represent
  // half a cell inside, so boundary rows/columns count 1/2
  auto wx = [&](int i) { return (i == g.band || i == g.n - g.band) ? 0.5 : 1.0; };
  auto wy = [&](int j) { return (j == g.band || j == g.m - g.band) ? 0.5 : 1.0; };
  double total = 0.0;
  for (int l = 0; l <= g.p; ++l) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t q = g.node(i, j, l);
        const bool in0 = g.in_domain(i, j);
        if (i < g.n && (in0 || g.in_domain(i + 1, j)))
          total += wy(j) * phi.x1[q] * (f.v[q + 1] - f.v[q]) / g.h1;
        if (j < g.m && (in0 || g.in_domain(i, j + 1)))
          total += wx(i) * phi.x2[q] * (f.v[q + nx] - f.v[q]) / g.h2;
        if (l < g.p && in0)
          total += wx(i) * wy(j) * phi.s[q] * (f.v[q + C] - f.v[q]) / g.hs;
      }
    }
  }
  return total * g.h1 * g.h2 * g.hs;
}

PdSolver::PdSolver(const LiftedProblem& pb, const TransportModel& model, SolverOptions opts)
    : grid_(pb.grid),
      model_(model),
      opts_(opts),
      ops_(&kern::get_kernels(opts.dykstra.kernels)),
      v_(pb.initial) {
  if (!(opts_.stop_tol > 0.0)) throw invalid_parameter("stop_tol must be > 0");
  if (!(opts_.theta >= 0.0 && opts_.theta <= 1.0))
    throw invalid_parameter("theta must be in [0,1]");
  const ResolvedSteps st = resolve_steps(opts_, grid_);
  tau_ = st.tau;
  sigma_ = st.sigma;
  project_C_inplace(v_);
  const std::size_t n = grid_.nnodes();
  v_prev_.assign(n, 0.0);
  vbar_ = v_.v;
  adj_.assign(n, 0.0);
  phi_ = DualField::zeros(grid_);
  phi_prev_ = phi_;
  projector_ = std::make_unique<DykstraProjector>(grid_, model_, opts_.dykstra);
}

void PdSolver::adjoint_into(std::vector<double>& out, const DualField& phi) const {
  const int nx = grid_.nx(), ny = grid_.ny(), C = grid_.ncols(), p = grid_.p;
  std::fill(out.begin(), out.end(), 0.0);
  // x1: unit stride, every (j,l) row handled with its own boundary nodes
  ops_->adj_rows(out.data(), phi.x1.data(), 1.0 / grid_.h1, nx,
                 static_cast<std::size_t>(ny) * (p + 1));
  // x2: stride nx within each layer
  const std::size_t layer = static_cast<std::size_t>(C);
  for (int l = 0; l <= p; ++l) {
    const std::size_t base = l * layer;
    ops_->adj_head(out.data(), phi.x2.data(), 1.0 / grid_.h2, base, base + nx);
    ops_->adj_gather(out.data(), phi.x2.data(), 1.0 / grid_.h2, nx, base + nx,
                     base + layer - nx);
    ops_->adj_tail(out.data(), phi.x2.data(), 1.0 / grid_.h2, nx, base + layer - nx,
                   base + layer);
  }
  // s: stride C across layers
  ops_->adj_head(out.data(), phi.s.data(), 1.0 / grid_.hs, 0, layer);
  ops_->adj_gather(out.data(), phi.s.data(), 1.0 / grid_.hs, C, layer,
                   static_cast<std::size_t>(p) * layer);
  ops_->adj_tail(out.data(), phi.s.data(), 1.0 / grid_.hs, C,
                 static_cast<std::size_t>(p) * layer,
                 static_cast<std::size_t>(p + 1) * layer);
}

void PdSolver::ascent(DualField& phi, const std::vector<double>& vbar) const {
  const int nx = grid_.nx(), ny = grid_.ny(), C = grid_.ncols(), p = grid_.p;
  ops_->ascent_rows(phi.x1.data(), vbar.data(), sigma_ / grid_.h1, nx,
                    static_cast<std::size_t>(ny) * (p + 1));
  const std::size_t layer = static_cast<std::size_t>(C);
  for (int l = 0; l <= p; ++l) {
    const std::size_t base = l * layer;
    ops_->ascent_strided(phi.x2.data(), vbar.data(), sigma_ / grid_.h2, nx, base,
                         base + layer - nx);
  }
  ops_->ascent_strided(phi.s.data(), vbar.data(), sigma_ / grid_.hs, C, 0,
                       static_cast<std::size_t>(p) * layer);
}

void PdSolver::step() {
  const std::size_t n = grid_.nnodes();
  std::memcpy(v_prev_.data(), v_.v.data(), n * sizeof(double));
  adjoint_into(adj_, phi_);
  const double dv = ops_->primal_step(v_.v.data(), adj_.data(), v_.frozen.data(),
                                      v_.state.data(), tau_, n);
  ops_->extrapolate(vbar_.data(), v_.v.data(), v_prev_.data(), opts_.theta, n);
  phi_prev_ = phi_;
  ascent(phi_, vbar_);
  const DykstraReport rep = projector_->project(phi_);
  dyk_violation_ = rep.violation;
  dyk_cycles_ = rep.cycles;
  double dphi = ops_->max_abs_diff(phi_.x1.data(), phi_prev_.x1.data(), n);
  dphi = std::max(dphi, ops_->max_abs_diff(phi_.x2.data(), phi_prev_.x2.data(), n));
  dphi = std::max(dphi, ops_->max_abs_diff(phi_.s.data(), phi_prev_.s.data(), n));
  residual_ = std::max(dv / tau_, dphi / sigma_);
  ++iters_;
}

double PdSolver::value() const { return saddle_value(v_, phi_, grid_); }

SolveResult PdSolver::run() {
  SolveResult res;
  bool converged = false;
  while (iters_ < opts_.max_iters) {
    step();
    if (opts_.log_every > 0 && (iters_ % opts_.log_every == 0)) {
      LogEntry e;
      e.iter = iters_;
      e.residual = residual_;
      e.dykstra_violation = dyk_violation_;
      e.dykstra_cycles = dyk_cycles_;
      if (opts_.log_energy) e.energy = value();
      res.log.push_back(e);
    }
    if (residual_ <= opts_.stop_tol) {
      converged = true;
      break;
    }
  }
  // strict final projection so the reported dual is feasible to tol
  {
    DykstraOptions strict = opts_.dykstra;
    strict.movement_tol = strict.tol;
    strict.max_cycles = std::max(200, strict.max_cycles);
    projector_->set_options(strict);
    const DykstraReport rep = projector_->project(phi_);
    dyk_violation_ = rep.violation;
    projector_->set_options(opts_.dykstra);
  }
  res.v = v_;
  res.phi = phi_;
  res.primal_value = value();
  res.iterations = iters_;
  res.converged = converged;
  res.residual = residual_;
  res.dykstra_violation = dyk_violation_;
  return res;
}

SolveResult solve(const LiftedProblem& pb, const TransportModel& model,
                  const SolverOptions& opts) {
  PdSolver solver(pb, model, opts);
  return solver.run();
}

SolveResult solve(const Scenario& sc, int n, int m, int p, int band,
                  const SolverOptions& opts) {
  LiftedProblem pb = build_problem(sc, n, m, p, band);
  return solve(pb, sc.model, opts);
}

}  // namespace netlift
