#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "kinwall/config.hpp"
#include "kinwall/experiments.hpp"
#include "kinwall/io.hpp"

namespace {

constexpr const char* kVersion = "kinwall 0.1.0";

using Runner = std::function<int(const kinwall::RunConfig&, kinwall::OutputDir&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r = {
      {"simulate", kinwall::run_simulate},
      {"steady", kinwall::run_steady},
      {"rate", kinwall::run_rate},
      {"verify-kernel", kinwall::run_verify_kernel},
      {"lyapunov", kinwall::run_lyapunov},
      {"flux", kinwall::run_flux},
      {"doeblin", kinwall::run_doeblin},
      {"counterexample", kinwall::run_counterexample},
  };
  return r;
}

void usage(std::ostream& os) {
  os << "usage: kinwall <subcommand> [--config PATH] [--seed U64]"
        " [--workers N] [--out DIR]\n"
        "subcommands: simulate | steady | rate | verify-kernel | lyapunov |"
        " flux | doeblin | counterexample\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    usage(std::cerr);
    return 2;
  }
  const std::string sub = argv[1];
  const auto it = runners().find(sub);
  if (it == runners().end()) {
    usage(std::cerr);
    return 2;
  }

  CLI::App app{kVersion};
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  bool have_seed = false;
  int workers_override = 0;
  app.add_option("--config", config_path, "configuration file (JSON)");
  app.add_option("--seed", seed_override, "master seed override")
      ->each([&](const std::string&) { have_seed = true; });
  app.add_option("--workers", workers_override, "worker thread count");
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc - 1, argv + 1);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  kinwall::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = kinwall::load_config(config_path);
    if (have_seed) cfg.simulation.master_seed = seed_override;
    if (workers_override > 0) cfg.simulation.workers = workers_override;
  } catch (const kinwall::ConfigError& e) {
    std::cerr << "configuration rejected:\n";
    for (const auto& v : e.violations) std::cerr << "  - " << v << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::string root = out_dir;
  if (root.empty()) {
    if (const char* env = std::getenv("KW_OUT_DIR"))
      root = std::string(env) + "/" + sub;
    else
      root = cfg.output_dir;
  }

  kinwall::OutputDir out{root};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    // manifest first: everything needed to reproduce the run; the worker
    // count is omitted because results are independent of it by contract
    kinwall::ordered_json manifest;
    manifest["tool"] = kVersion;
    manifest["subcommand"] = sub;
    manifest["master_seed"] = cfg.simulation.master_seed;
    kinwall::ordered_json echo = kinwall::config_to_json(cfg);
    echo["simulation"].erase("workers");
    manifest["config"] = echo;
    out.write_json("manifest.json", manifest);

    const int status = it->second(cfg, out);
    const auto dt = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::cerr << sub << ": done in " << kinwall::format_number(dt)
              << " s, exit " << status << "\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << sub << " failed: " << e.what() << "\n";
    out.discard_all();
    return 1;
  }
}
