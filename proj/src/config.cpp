#include "netlift/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "netlift/errors.hpp"

namespace netlift {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& where, int line, const std::string& key,
                       const std::string& msg) {
  std::ostringstream os;
  os << where << ":" << line << ": key '" << key << "': " << msg;
  throw config_error(os.str());
}

double parse_double(const std::string& v, const std::string& where, int line,
                    const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) fail(where, line, key, "trailing characters in number '" + v + "'");
    return d;
  } catch (const config_error&) {
    throw;
  } catch (...) {
    fail(where, line, key, "expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& where, int line,
              const std::string& key) {
  try {
    std::size_t pos = 0;
    const int d = std::stoi(v, &pos);
    if (pos != v.size()) fail(where, line, key, "trailing characters in integer '" + v + "'");
    return d;
  } catch (const config_error&) {
    throw;
  } catch (...) {
    fail(where, line, key, "expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& where, int line,
                const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(where, line, key, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cur = trim(cur);
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::pair<double, double>> parse_atoms(const std::string& v,
                                                   const std::string& where, int line,
                                                   const std::string& key) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split_commas(v)) {
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      fail(where, line, key, "expected position:mass, got '" + item + "'");
    out.emplace_back(parse_double(trim(item.substr(0, colon)), where, line, key),
                     parse_double(trim(item.substr(colon + 1)), where, line, key));
  }
  return out;
}

std::vector<double> parse_list(const std::string& v, const std::string& where, int line,
                               const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_commas(v)) out.push_back(parse_double(item, where, line, key));
  return out;
}

void apply(RunConfig& rc, const std::string& key, const std::string& value,
           const std::string& where, int line) {
  if (key == "mode") {
    if (value != "solve" && value != "oracle" && value != "certificate" && value != "sweep")
      fail(where, line, key, "unknown mode '" + value + "'");
    rc.mode = value;
  } else if (key == "scenario.width") {
    rc.width = parse_double(value, where, line, key);
  } else if (key == "scenario.height") {
    rc.height = parse_double(value, where, line, key);
  } else if (key == "scenario.model") {
    if (value != "urban" && value != "branched")
      fail(where, line, key, "unknown model '" + value + "'");
    rc.model = value;
  } else if (key == "scenario.a") {
    rc.a = parse_double(value, where, line, key);
  } else if (key == "scenario.eps") {
    rc.eps = parse_double(value, where, line, key);
  } else if (key == "scenario.sources") {
    rc.sources = parse_atoms(value, where, line, key);
  } else if (key == "scenario.sinks") {
    rc.sinks = parse_atoms(value, where, line, key);
  } else if (key == "grid.n") {
    rc.n = parse_int(value, where, line, key);
  } else if (key == "grid.m") {
    rc.m = parse_int(value, where, line, key);
  } else if (key == "grid.p") {
    rc.p = parse_int(value, where, line, key);
  } else if (key == "grid.band") {
    rc.band = parse_int(value, where, line, key);
  } else if (key == "solver.tau") {
    rc.tau = parse_double(value, where, line, key);
  } else if (key == "solver.sigma") {
    rc.sigma = parse_double(value, where, line, key);
  } else if (key == "solver.step_factor") {
    rc.step_factor = parse_double(value, where, line, key);
  } else if (key == "solver.theta") {
    rc.theta = parse_double(value, where, line, key);
  } else if (key == "solver.max_iters") {
    rc.max_iters = parse_int(value, where, line, key);
  } else if (key == "solver.stop_tol") {
    rc.stop_tol = parse_double(value, where, line, key);
  } else if (key == "solver.dykstra_tol") {
    rc.dykstra_tol = parse_double(value, where, line, key);
  } else if (key == "solver.dykstra_max_cycles") {
    rc.dykstra_max_cycles = parse_int(value, where, line, key);
  } else if (key == "solver.dykstra_movement_tol") {
    rc.dykstra_movement_tol = parse_double(value, where, line, key);
  } else if (key == "solver.dyadic_pairs") {
    rc.dyadic_pairs = parse_bool(value, where, line, key);
  } else if (key == "solver.kernels") {
    if (value != "auto" && value != "scalar" && value != "opt" && value != "avx2")
      fail(where, line, key, "unknown kernel variant '" + value + "'");
    rc.kernels = value;
  } else if (key == "oracle.max_steiner") {
    rc.max_steiner = parse_int(value, where, line, key);
  } else if (key == "certificate.ell") {
    rc.certificate_ell = parse_double(value, where, line, key);
  } else if (key == "certificate.density") {
    rc.certificate_density = parse_int(value, where, line, key);
  } else if (key == "extract.mass_tol") {
    rc.mass_tol = value == "auto" ? 0.0 : parse_double(value, where, line, key);
  } else if (key == "extract.soft_collapse") {
    rc.soft_collapse = parse_bool(value, where, line, key);
  } else if (key == "outputs.dir") {
    rc.out_dir = value;
  } else if (key == "outputs.formats") {
    rc.formats = split_commas(value);
    for (const auto& f : rc.formats)
      if (f != "csv" && f != "pgm" && f != "json")
        fail(where, line, key, "unknown format '" + f + "'");
  } else if (key == "outputs.log_every") {
    rc.log_every = parse_int(value, where, line, key);
  } else if (key == "sweep.eps") {
    rc.sweep_eps = parse_list(value, where, line, key);
  } else if (key == "sweep.oracle") {
    rc.sweep_oracle = parse_bool(value, where, line, key);
  } else {
    fail(where, line, key, "unknown key");
  }
}

}  // namespace

void apply_key(RunConfig& rc, const std::string& key, const std::string& value,
               const std::string& where) {
  apply(rc, key, value, where, 0);
}

RunConfig parse_config_text(const std::string& text, const std::string& filename) {
  RunConfig rc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(filename, lineno, line, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      fail(filename, lineno, key, "duplicate key");
    seen.push_back(key);
    apply(rc, key, value, filename, lineno);
  }
  return rc;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_atoms(const std::vector<std::pair<double, double>>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ", ";
    out += fmt(atoms[i].first) + ":" + fmt(atoms[i].second);
  }
  return out;
}

}  // namespace

std::string write_config(const RunConfig& rc) {
  std::ostringstream os;
  os << "mode = " << rc.mode << "\n";
  os << "scenario.width = " << fmt(rc.width) << "\n";
  os << "scenario.height = " << fmt(rc.height) << "\n";
  os << "scenario.model = " << rc.model << "\n";
  os << "scenario.a = " << fmt(rc.a) << "\n";
  os << "scenario.eps = " << fmt(rc.eps) << "\n";
  os << "scenario.sources = " << fmt_atoms(rc.sources) << "\n";
  os << "scenario.sinks = " << fmt_atoms(rc.sinks) << "\n";
  os << "grid.n = " << rc.n << "\n";
  os << "grid.m = " << rc.m << "\n";
  os << "grid.p = " << rc.p << "\n";
  os << "grid.band = " << rc.band << "\n";
  os << "solver.tau = " << fmt(rc.tau) << "\n";
  os << "solver.sigma = " << fmt(rc.sigma) << "\n";
  os << "solver.step_factor = " << fmt(rc.step_factor) << "\n";
  os << "solver.theta = " << fmt(rc.theta) << "\n";
  os << "solver.max_iters = " << rc.max_iters << "\n";
  os << "solver.stop_tol = " << fmt(rc.stop_tol) << "\n";
  os << "solver.dykstra_tol = " << fmt(rc.dykstra_tol) << "\n";
  os << "solver.dykstra_max_cycles = " << rc.dykstra_max_cycles << "\n";
  os << "solver.dykstra_movement_tol = " << fmt(rc.dykstra_movement_tol) << "\n";
  os << "solver.dyadic_pairs = " << (rc.dyadic_pairs ? "true" : "false") << "\n";
  os << "solver.kernels = " << rc.kernels << "\n";
  os << "oracle.max_steiner = " << rc.max_steiner << "\n";
  os << "certificate.ell = " << fmt(rc.certificate_ell) << "\n";
  os << "certificate.density = " << rc.certificate_density << "\n";
  os << "extract.mass_tol = " << (rc.mass_tol == 0.0 ? std::string("auto") : fmt(rc.mass_tol))
     << "\n";
  os << "extract.soft_collapse = " << (rc.soft_collapse ? "true" : "false") << "\n";
  os << "outputs.dir = " << rc.out_dir << "\n";
  os << "outputs.formats = ";
  for (std::size_t i = 0; i < rc.formats.size(); ++i)
    os << (i ? "," : "") << rc.formats[i];
  os << "\n";
  os << "outputs.log_every = " << rc.log_every << "\n";
  os << "sweep.eps = ";
  for (std::size_t i = 0; i < rc.sweep_eps.size(); ++i)
    os << (i ? ", " : "") << fmt(rc.sweep_eps[i]);
  os << "\n";
  os << "sweep.oracle = " << (rc.sweep_oracle ? "true" : "false") << "\n";
  return os.str();
}

void validate(const RunConfig& rc) {
  if (rc.mode != "certificate" && (rc.sources.empty() || rc.sinks.empty()))
    throw config_error("config: scenario.sources and scenario.sinks must be non-empty");
  if (rc.mode == "sweep" && rc.sweep_eps.empty())
    throw config_error("config: sweep.eps must be non-empty in sweep mode");
  if (rc.log_every < 0) throw config_error("config: outputs.log_every must be >= 0");
}

Scenario scenario_from_config(const RunConfig& rc) {
  Scenario sc;
  sc.width = rc.width;
  sc.height = rc.height;
  for (auto [t, w] : rc.sources) sc.sources.atoms.push_back({t, w});
  for (auto [t, w] : rc.sinks) sc.sinks.atoms.push_back({t, w});
  sc.sources = canonical(sc.sources, sc.perimeter());
  sc.sinks = canonical(sc.sinks, sc.perimeter());
  sc.model = rc.model == "urban" ? TransportModel::urban(rc.a, rc.eps)
                                 : TransportModel::branched(rc.eps);
  validate(sc);
  return sc;
}

double effective_mass_tol(const RunConfig& rc) {
  if (rc.mass_tol > 0.0) return rc.mass_tol;
  double min_mass = 1e300;
  for (auto [t, w] : rc.sources) min_mass = std::min(min_mass, w);
  for (auto [t, w] : rc.sinks) min_mass = std::min(min_mass, w);
  if (min_mass >= 1e300) min_mass = 1.0;
  return 0.25 * min_mass;
}

}  // namespace netlift
