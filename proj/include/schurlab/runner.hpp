#pragma once

#include <optional>
#include <vector>

#include "schurlab/io.hpp"

namespace schurlab {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::optional<int> jobs;
};

struct RunResult {
  Json report;
  bool pass = true;
  std::vector<NormGrowthRecord> records;  // norms only
};

/// Validates `config` against the config schema (ConfigInvalid on failure)
/// and runs the requested experiment.
RunResult run_experiment(const Json& config, const RunOptions& options = {});

}  // namespace schurlab
