#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ganlab/config.hpp"
#include "ganlab/trainers.hpp"

namespace ganlab::sweep {

// One swept setting: a "section.key" path and the values it cycles through.
struct AxisSpec {
  std::string section;
  std::string key;
  std::vector<config::ConfigValue> values;
  std::string path() const { return section + "." + key; }
};

// A sweep file is an ordinary experiment config plus two extra sections:
// [sweep] with `seeds = [ ... ]`, and [axes] with one `section.key = [v, ...]`
// entry per swept setting. The grid is the cartesian product of the axes
// (sorted by path) with the seed list innermost.
struct SweepSpec {
  config::ConfigDoc base;
  std::vector<AxisSpec> axes;
  std::vector<std::uint64_t> seeds;
};

SweepSpec parse_sweep(const std::string& text);
SweepSpec load_sweep_file(const std::string& path);

struct SweepCell {
  int index = 0;            // position in the deterministic grid order
  std::vector<int> choice;  // chosen value index per axis
  std::uint64_t seed = 0;
  config::Experiment experiment;  // fully built config for this cell
};

// Expands the grid in its deterministic order and builds every cell's
// config (throwing on any invalid combination before work starts).
std::vector<SweepCell> enumerate_cells(const SweepSpec& spec);

struct SweepRow {
  int index = 0;
  std::vector<int> choice;
  std::uint64_t seed = 0;
  std::string status;
  double wall_time_s = 0.0;
  metrics::MetricsRecord final_record;
};

// Runs every cell on a pool of `parallelism` workers. Results are collected
// into grid order, so the returned rows (and anything written from them)
// do not depend on the pool size. A diverged run is an ordinary row, not an
// error. `on_done` (optional) fires once per finished cell, serialized.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int parallelism,
                                const std::function<void(const SweepRow&)>& on_done = {});

// One row per cell: run id, each axis value, seed, status, wall time, and
// the final logged metrics.
std::string index_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace ganlab::sweep
