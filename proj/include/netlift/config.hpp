#pragma once

#include <string>
#include <utility>
#include <vector>

#include "netlift/model.hpp"

namespace netlift {

// Flat dotted key-value run configuration, diff-friendly and dependency-free.
struct RunConfig {
  std::string mode = "solve";  // solve | oracle | certificate | sweep

  double width = 1.0, height = 1.0;
  std::string model = "urban";  // urban | branched
  double a = 2.0;
  double eps = 0.1;
  std::vector<std::pair<double, double>> sources;  // (arclength, mass)
  std::vector<std::pair<double, double>> sinks;

  int n = 34, m = 34, p = 34, band = 1;

  double tau = 0.0, sigma = 0.0;  // 0: derived from step_factor
  double step_factor = 0.99;
  double theta = 1.0;
  int max_iters = 20000;
  double stop_tol = 1e-5;
  double dykstra_tol = 1e-6;
  int dykstra_max_cycles = 4;
  double dykstra_movement_tol = 0.0;  // 0: feasibility stop (inexact prox)
  bool dyadic_pairs = false;
  std::string kernels = "auto";

  int max_steiner = 6;
  double certificate_ell = 0.0;  // 0: use scenario width
  int certificate_density = 50;
  double mass_tol = 0.0;  // 0: 0.25 * smallest atom mass
  bool soft_collapse = false;  // image from layer sums instead of counting

  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "pgm", "json"};
  int log_every = 1;

  std::vector<double> sweep_eps;
  bool sweep_oracle = true;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config_text(const std::string& text, const std::string& filename = "<config>");
RunConfig parse_config_file(const std::string& path);

// Applies one "key = value" override (the --set flag).
void apply_key(RunConfig& rc, const std::string& key, const std::string& value,
               const std::string& where = "<override>");

// Canonical serialization; parse(write(rc)) == rc.
std::string write_config(const RunConfig& rc);

// Mode-dependent completeness checks (non-empty measures, sweep list, ...).
void validate(const RunConfig& rc);

Scenario scenario_from_config(const RunConfig& rc);
double effective_mass_tol(const RunConfig& rc);

}  // namespace netlift
