#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "netlift/run.hpp"

namespace {

void usage(std::ostream& os) {
  os << "usage: netlift --config PATH [--out DIR] [--mode solve|oracle|certificate|sweep]\n"
        "               [--set KEY=VALUE]... [--quiet]\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_path, out_dir, mode;
  std::vector<std::string> sets;
  bool quiet = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "netlift: missing value for " << arg << "\n";
        std::exit(1);
      }
      return argv[++i];
    };
    if (arg == "--config") {
      config_path = next();
    } else if (arg == "--out") {
      out_dir = next();
    } else if (arg == "--mode") {
      mode = next();
    } else if (arg == "--set") {
      sets.push_back(next());
    } else if (arg == "--quiet") {
      quiet = true;
    } else if (arg == "--help" || arg == "-h") {
      usage(std::cout);
      return 0;
    } else {
      std::cerr << "netlift: unknown flag '" << arg << "'\n";
      usage(std::cerr);
      return 1;
    }
  }
  if (config_path.empty()) {
    std::cerr << "netlift: --config is required\n";
    usage(std::cerr);
    return 1;
  }
  try {
    netlift::RunConfig rc = netlift::parse_config_file(config_path);
    for (const auto& kv : sets) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "netlift: --set expects KEY=VALUE, got '" << kv << "'\n";
        return 1;
      }
      netlift::apply_key(rc, kv.substr(0, eq), kv.substr(eq + 1), "--set");
    }
    if (!out_dir.empty()) rc.out_dir = out_dir;
    if (!mode.empty()) netlift::apply_key(rc, "mode", mode, "--mode");
    return netlift::run(rc, quiet);
  } catch (const std::exception& e) {
    std::cerr << "netlift: " << e.what() << "\n";
    return 1;
  }
}
