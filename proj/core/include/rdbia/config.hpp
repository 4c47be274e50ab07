#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdbia/bounds.hpp"
#include "rdbia/chain.hpp"
#include "rdbia/distortion.hpp"

namespace rdbia {

// Parsed experiment description. The chain document uses the fixed field
// names {"states", "P", "pi0"}; "distortion" is either the string "hamming"
// or an explicit matrix. Everything else has defaults.
struct ExperimentConfig {
  MarkovChain chain;
  DistortionSpec distortion;
  std::vector<std::pair<std::string, std::vector<double>>> initial_distributions;
  std::vector<int> T_list;
  std::vector<int> tau_list;      // empty = all tau < T
  std::vector<double> D_list;
  std::vector<double> D_grid;     // rd-curve grid; empty = derived default
  int tau_max = 12;               // chain-info table depth
  int tau_ref = 0;                // converge diagnostic
  double ba_tol_bits = 1e-9;
  double bound_tol_bits = 1e-6;
  int max_iters = 200000;         // generous; hard cells need a few 10k
  std::uint64_t seed = 20240601;
  std::size_t budget = kDefaultBlockBudget;

  SolverOptions solver_options() const {
    SolverOptions o;
    o.ba_tol_bits = ba_tol_bits;
    o.max_iters = max_iters;
    return o;
  }
};

// Parses a config document, reporting the offending field on error.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Chain-only ingestion of {"states": [...], "P": [[...]], "pi0": [...]}.
MarkovChain chain_from_json_text(const std::string& json_text);

}  // namespace rdbia
