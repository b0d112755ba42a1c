#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "procalab/io.hpp"
#include "procalab/runner.hpp"

namespace {

int dispatch(const std::string& experiment, const std::string& config_path,
             long seed_override, bool has_seed, const std::string& out_override,
             int threads_override) {
  using namespace procalab;
  try {
    RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::load_file(config_path);
    if (!experiment.empty()) cfg.set("run", "experiment", experiment);
    if (has_seed) cfg.set("run", "seed", std::to_string(seed_override));
    if (!out_override.empty()) cfg.set("run", "out_dir", out_override);
    if (threads_override > 0) {
      cfg.set("run", "threads", std::to_string(threads_override));
    } else if (!cfg.has("run", "threads")) {
      if (const char* env = std::getenv("PROCA_LATTICE_THREADS"))
        cfg.set("run", "threads", env);
    }
    const auto files = run_experiment(cfg, std::cout);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"procalab: lattice Yang-Mills-Higgs and Proca field laboratory"};
  app.set_version_flag("--version", std::string("procalab ") + procalab::kVersion);

  std::string config_path, out_dir;
  long seed = 0;
  int threads = 0;

  app.add_option("--config", config_path, "run configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "override [run] seed");
  app.add_option("--out", out_dir, "override [run] out_dir");
  app.add_option("--threads", threads,
                 "worker threads (fallback: PROCA_LATTICE_THREADS)");

  const std::vector<std::string> experiments = {
      "sample-ymh", "sample-proca", "lift",    "pair",
      "compare",    "decay",        "scaling", "spectrum"};
  std::string chosen;
  for (const auto& name : experiments) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->callback([&chosen, name]() { chosen = name; });
  }
  app.require_subcommand(0, 1);

  CLI11_PARSE(app, argc, argv);

  if (chosen.empty() && config_path.empty()) {
    std::cerr << app.help();
    return 2;
  }
  return dispatch(chosen, config_path, seed, seed_opt->count() > 0, out_dir, threads);
}
