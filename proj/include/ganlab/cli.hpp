#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ganlab::cli {

// Each command returns a process exit code. A run that diverges is reported
// data, not a failure; only unusable inputs (bad config, missing file) and
// gradient-check failures produce a nonzero code.

// Trains one configured run and writes config.toml, metrics.csv,
// samples.csv, runlog.json, and (optionally) histogram.svg into out_dir.
int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override, bool svg);

// Prints the summary and final metrics stored in a runlog.json.
int cmd_eval(const std::string& runlog_path);

// Expands a sweep file into its full grid, runs every cell on a worker
// pool, and writes index.csv into out_dir. Row order is the deterministic
// grid order regardless of parallelism.
int cmd_sweep(const std::string& sweep_path, const std::string& out_dir, int parallelism);

// Finite-difference audit of every tensor-op and loss gradient plus the
// gradient-of-gradient path; nonzero exit on any mismatch.
int cmd_gradcheck(int cases_per_op, std::uint64_t seed);

// Trains the adversarial recipe and the denoising-diffusion baseline on the
// same distribution and seed set, then writes a two-row compare.csv.
// An empty config_path selects a built-in matched setup.
int cmd_compare(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed_override);

// Argument parsing for the `ganlab` binary (train/eval/sweep/gradcheck/
// compare verbs); dispatches to the commands above.
int run_cli(int argc, const char* const* argv);

}  // namespace ganlab::cli
