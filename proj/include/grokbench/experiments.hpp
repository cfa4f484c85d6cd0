#pragma once

#include <string>

#include "grokbench/config.hpp"

namespace grokbench {

/// Experiment drivers behind the CLI subcommands. Each takes a flat config,
/// fills unset keys with its defaults, runs, and writes artifacts (history
/// CSVs, matrix snapshots, config.txt, run.json) into <outdir>. The int
/// return is a process exit code: 0 success, 3 numerical failure; config
/// errors throw std::invalid_argument and the caller maps them to exit 2.
int run_rfm_experiment(Config cfg);
int run_multitask_experiment(Config cfg);
int run_random_circulant_experiment(Config cfg);
int run_enforce_circulant_experiment(Config cfg);
int run_nn_experiment(Config cfg);
int run_nn_ablation_experiment(Config cfg);
int run_fma_verify(Config cfg);
int run_reorder(Config cfg);
int run_plot(Config cfg);

/// Applies the experiment's defaults without running (used for round-trip
/// tests and `--print-config`).
Config with_defaults(const std::string& experiment, Config cfg);

}  // namespace grokbench
