#include "netlift/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "netlift/certificate.hpp"
#include "netlift/oracle.hpp"

namespace netlift {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool wants(const RunConfig& rc, const std::string& format) {
  return std::find(rc.formats.begin(), rc.formats.end(), format) != rc.formats.end();
}

}  // namespace

std::string render_u_csv(const GridImage& u) {
  std::string out = "i,j,x1,x2,u\n";
  for (int j = 0; j < u.ny; ++j)
    for (int i = 0; i < u.nx; ++i)
      out += std::to_string(i) + "," + std::to_string(j) + "," + fmt(u.x(i)) + "," +
             fmt(u.y(j)) + "," + fmt(u.at(i, j)) + "\n";
  return out;
}

std::string render_flux_csv(const FluxField& f) {
  // both components averaged to the cell centers of the dual grid
  std::string out = "i,j,x1,x2,fx,fy\n";
  for (int j = 0; j + 1 < f.ny; ++j) {
    for (int i = 0; i + 1 < f.nx; ++i) {
      const double fx = 0.5 * (f.fx[static_cast<std::size_t>(j) * f.nx + i] +
                               f.fx[static_cast<std::size_t>(j) * f.nx + i + 1]);
      const double fy = 0.5 * (f.fy[static_cast<std::size_t>(j) * (f.nx - 1) + i] +
                               f.fy[static_cast<std::size_t>(j + 1) * (f.nx - 1) + i]);
      out += std::to_string(i) + "," + std::to_string(j) + "," +
             fmt(f.origin.x + (i + 0.5) * f.h1) + "," + fmt(f.origin.y + (j + 0.5) * f.h2) +
             "," + fmt(fx) + "," + fmt(fy) + "\n";
    }
  }
  return out;
}

std::string render_pgm(const GridImage& u, double lo, double hi) {
  std::string out = "P5\n" + std::to_string(u.nx) + " " + std::to_string(u.ny) + "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  for (int j = u.ny - 1; j >= 0; --j) {  // row 0 of the image = top of the domain
    for (int i = 0; i < u.nx; ++i) {
      const double t = (u.at(i, j) - lo) / span;
      const int g = std::clamp(static_cast<int>(std::lround(255.0 * t)), 0, 255);
      out += static_cast<char>(g);
    }
  }
  return out;
}

std::string render_network_csv(const NetworkSegments& segs) {
  std::string out = "x1a,x2a,x1b,x2b,mass\n";
  for (const auto& s : segs)
    out += fmt(s.a.x) + "," + fmt(s.a.y) + "," + fmt(s.b.x) + "," + fmt(s.b.y) + "," +
           fmt(s.mass) + "\n";
  return out;
}

std::string render_energy_json(const EnergySummary& e) {
  std::string out = "{";
  bool first = true;
  auto add = [&](const std::string& key, const std::string& value) {
    if (!first) out += ",";
    first = false;
    out += "\"" + key + "\":" + value;
  };
  if (e.primal_value) add("primal_value", fmt(*e.primal_value));
  if (e.grid_energy) add("grid_energy", fmt(*e.grid_energy));
  if (e.oracle_energy) add("oracle_energy", fmt(*e.oracle_energy));
  if (e.certificate_bound) add("certificate_bound", fmt(*e.certificate_bound));
  if (e.iterations) add("iterations", std::to_string(*e.iterations));
  if (e.converged) add("converged", *e.converged ? "true" : "false");
  if (e.binarity_score) add("binarity_score", fmt(*e.binarity_score));
  out += "}\n";
  return out;
}

std::string render_log_jsonl(const std::vector<LogEntry>& log) {
  std::string out;
  for (const auto& e : log)
    out += "{\"iter\":" + std::to_string(e.iter) + ",\"residual\":" + fmt(e.residual) +
           ",\"dykstra_violation\":" + fmt(e.dykstra_violation) + "}\n";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw config_error("failed writing '" + path + "'");
}

namespace {

SolverOptions solver_options(const RunConfig& rc) {
  SolverOptions opts;
  opts.tau = rc.tau;
  opts.sigma = rc.sigma;
  opts.step_factor = rc.step_factor;
  opts.theta = rc.theta;
  opts.max_iters = rc.max_iters;
  opts.stop_tol = rc.stop_tol;
  opts.dykstra.tol = rc.dykstra_tol;
  opts.dykstra.max_cycles = rc.dykstra_max_cycles;
  opts.dykstra.movement_tol = rc.dykstra_movement_tol;
  opts.dykstra.dyadic = rc.dyadic_pairs;
  opts.dykstra.kernels = kern::parse_kernel_variant(rc.kernels);
  opts.log_every = rc.log_every;
  return opts;
}

struct SolveArtifacts {
  SolveResult result;
  CollapseResult image;
  double grid_e = 0.0;
  double trace_lo = 0.0, trace_hi = 0.0;
};

SolveArtifacts run_solve(const RunConfig& rc, const Scenario& sc, bool quiet) {
  LiftedProblem pb = build_problem(sc, rc.n, rc.m, rc.p, rc.band);
  if (!quiet)
    std::cout << "grid " << rc.n << "x" << rc.m << "x" << rc.p
              << ", atom snap displacement " << pb.snap_displacement << "\n";
  SolveArtifacts art;
  art.result = solve(pb, sc.model, solver_options(rc));
  art.image = collapse(art.result.v, pb.grid);
  if (rc.soft_collapse) art.image.u = collapse_soft(art.result.v, pb.grid);
  art.grid_e = grid_energy(art.image.u, sc.model);
  art.trace_lo = pb.trace.min_value();
  art.trace_hi = pb.trace.max_value();
  if (!quiet)
    std::cout << "solve: value " << art.result.primal_value << ", iterations "
              << art.result.iterations << (art.result.converged ? "" : " (not converged)")
              << ", binarity " << art.image.binarity_score << "\n";
  return art;
}

void emit_solve(const RunConfig& rc, const SolveArtifacts& art) {
  const std::string dir = rc.out_dir;
  if (wants(rc, "csv")) {
    write_file(dir + "/u.csv", render_u_csv(art.image.u));
    write_file(dir + "/flux.csv", render_flux_csv(flux(art.image.u)));
    write_file(dir + "/network.csv",
               render_network_csv(extract_network(art.image.u, effective_mass_tol(rc))));
  }
  if (wants(rc, "pgm"))
    write_file(dir + "/u.pgm", render_pgm(art.image.u, art.trace_lo, art.trace_hi));
  if (wants(rc, "json")) {
    EnergySummary e;
    e.primal_value = art.result.primal_value;
    e.grid_energy = art.grid_e;
    e.iterations = art.result.iterations;
    e.converged = art.result.converged;
    e.binarity_score = art.image.binarity_score;
    write_file(dir + "/energy.json", render_energy_json(e));
    write_file(dir + "/log.jsonl", render_log_jsonl(art.result.log));
  }
}

int run_mode_solve(const RunConfig& rc, bool quiet) {
  const Scenario sc = scenario_from_config(rc);
  SolveArtifacts art = run_solve(rc, sc, quiet);
  emit_solve(rc, art);
  return art.result.converged ? 0 : 2;
}

int run_mode_oracle(const RunConfig& rc, bool quiet) {
  const Scenario sc = scenario_from_config(rc);
  OracleResult best = oracle_min_energy(sc, rc.max_steiner);
  if (!quiet)
    std::cout << "oracle: energy " << best.energy << ", topology " << best.topology_id
              << "\n";
  if (wants(rc, "json")) {
    EnergySummary e;
    e.oracle_energy = best.energy;
    write_file(rc.out_dir + "/energy.json", render_energy_json(e));
  }
  if (wants(rc, "csv")) {
    NetworkSegments segs;
    for (const auto& edge : best.graph.edges)
      segs.push_back({best.graph.vertices[edge.tail], best.graph.vertices[edge.head],
                      edge.weight});
    write_file(rc.out_dir + "/network.csv", render_network_csv(segs));
  }
  return 0;
}

int run_mode_certificate(const RunConfig& rc, bool quiet) {
  const double ell = rc.certificate_ell > 0.0 ? rc.certificate_ell : rc.width;
  const ModelKind kind = rc.model == "urban" ? ModelKind::Urban : ModelKind::Branched;
  CertificateParams cp = make_certificate(kind, rc.eps, rc.a, ell);
  AdmissibilityReport audit = verify_admissibility(cp, rc.certificate_density);
  CertificateBound bound = certificate_bound(cp);
  if (!quiet) {
    std::cout << "certificate: beta " << cp.beta << (cp.clamped ? " (clamped at a)" : "")
              << ", bound " << bound.total << ", excess " << bound.excess << "\n";
    std::cout << "admissibility audit: max relative violation " << audit.max_rel_violation
              << " at x=(" << audit.worst_x.x << "," << audit.worst_x.y << "), s=["
              << audit.worst_s1 << "," << audit.worst_s2 << "]\n";
  }
  if (wants(rc, "json")) {
    EnergySummary e;
    e.certificate_bound = bound.total;
    write_file(rc.out_dir + "/energy.json", render_energy_json(e));
  }
  return 0;
}

int run_mode_sweep(const RunConfig& rc, bool quiet) {
  std::string csv =
      "eps,primal_value,grid_energy,oracle_energy,oracle_topology,topology_match,"
      "iterations,converged,binarity_score\n";
  bool all_converged = true;
  for (double eps : rc.sweep_eps) {
    RunConfig point = rc;
    point.eps = eps;
    const Scenario sc = scenario_from_config(point);
    if (!quiet) std::cout << "sweep eps=" << eps << "\n";
    SolveArtifacts art = run_solve(point, sc, quiet);
    all_converged = all_converged && art.result.converged;
    std::string oracle_energy, oracle_topology, match;
    if (rc.sweep_oracle) {
      OracleResult best = oracle_min_energy(sc, rc.max_steiner);
      oracle_energy = fmt(best.energy);
      oracle_topology = family_name(classify_family(best.topology));
      match = topology_matches(best.graph, art.image.u, sc.height, effective_mass_tol(point))
                  ? "true"
                  : "false";
    }
    csv += fmt(eps) + "," + fmt(art.result.primal_value) + "," + fmt(art.grid_e) + "," +
           oracle_energy + "," + oracle_topology + "," + match + "," +
           std::to_string(art.result.iterations) + "," +
           (art.result.converged ? "true" : "false") + "," +
           fmt(art.image.binarity_score) + "\n";
  }
  write_file(rc.out_dir + "/sweep.csv", csv);
  return all_converged ? 0 : 2;
}

}  // namespace

int run(const RunConfig& rc, bool quiet) {
  validate(rc);
  std::filesystem::create_directories(rc.out_dir);
  if (rc.mode == "solve") return run_mode_solve(rc, quiet);
  if (rc.mode == "oracle") return run_mode_oracle(rc, quiet);
  if (rc.mode == "certificate") return run_mode_certificate(rc, quiet);
  if (rc.mode == "sweep") return run_mode_sweep(rc, quiet);
  throw config_error("unknown mode '" + rc.mode + "'");
}

}  // namespace netlift
