#pragma once

#include <iosfwd>
#include <memory>

#include "procalab/compare.hpp"
#include "procalab/config.hpp"

namespace procalab {

// Builders from config blocks. Validation failures throw ConfigError (or the
// modules' invalid_argument, which the CLI maps to exit 2 as well).
GroupSpec group_from_config(const RunConfig& cfg);
std::shared_ptr<const LatticeComplex> lattice_from_config(const RunConfig& cfg);
YmhParams ymh_from_config(const RunConfig& cfg);
ChainOptions mcmc_from_config(const RunConfig& cfg);
TestForm form_from_config(const RunConfig& cfg);

// Dispatches the configured experiment, writing artifacts under
// cfg.out_dir(). Returns the list of files written. Deterministic for a
// fixed seed in single-thread mode.
std::vector<std::string> run_experiment(const RunConfig& cfg, std::ostream& log);

}  // namespace procalab
