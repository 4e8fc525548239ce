#pragma once

#include <optional>
#include <string>

#include "netlift/config.hpp"
#include "netlift/extract.hpp"
#include "netlift/solver.hpp"

namespace netlift {

struct EnergySummary {
  std::optional<double> primal_value;
  std::optional<double> grid_energy;
  std::optional<double> oracle_energy;
  std::optional<double> certificate_bound;
  std::optional<int> iterations;
  std::optional<bool> converged;
  std::optional<double> binarity_score;
};

// Artifact renderers; all numeric output uses 17 significant digits so
// identical results produce byte-identical files.
std::string render_u_csv(const GridImage& u);
std::string render_flux_csv(const FluxField& f);
std::string render_pgm(const GridImage& u, double lo, double hi);
std::string render_network_csv(const NetworkSegments& segs);
std::string render_energy_json(const EnergySummary& e);
std::string render_log_jsonl(const std::vector<LogEntry>& log);

void write_file(const std::string& path, const std::string& content);

// Executes the configured mode and writes artifacts into rc.out_dir.
// Returns the process exit code: 0 ok, 2 non-converged solve.
int run(const RunConfig& rc, bool quiet);

}  // namespace netlift
