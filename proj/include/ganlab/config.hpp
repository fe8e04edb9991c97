#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/diffusion.hpp"
#include "ganlab/trainers.hpp"

namespace ganlab::config {

// Raised on any syntax or schema problem; the message names the offending
// key, section, or line.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- generic key/value document (a small TOML-style subset) -------------
//
// Supported syntax: `[section]` headers, `key = value` pairs, `#` comments,
// and values that are strings ("..."), integers, floats, booleans, or
// single-line arrays of those scalars. Keys may be bare (letters, digits,
// '_', '.', '-') or quoted.

struct ConfigValue {
  enum class Type { integer, real, boolean, string, array };
  Type type = Type::integer;
  long long int_value = 0;
  double real_value = 0.0;
  bool bool_value = false;
  std::string string_value;
  std::vector<ConfigValue> items;  // array elements (scalars only)
  int line = 0;                    // 1-based source line, for error messages
};

// section -> key -> value; key order within a section is not preserved.
using ConfigDoc = std::map<std::string, std::map<std::string, ConfigValue>>;

ConfigDoc parse_document(const std::string& text);

// ---- experiment schema ---------------------------------------------------

// Settings for the denoising-diffusion baseline; consumed by the comparison
// command, which trains it side by side with the adversarial run.
struct DiffusionSettings {
  std::string schedule = "linear";  // "linear" | "constant"
  int timesteps = 200;
  double beta = 0.01;        // constant schedule level
  double beta_start = 1e-4;  // linear schedule endpoints
  double beta_end = 0.02;
  int steps = 2000;
  int batch = 64;
  std::vector<int> hidden = {64, 64};
  double lr = 1e-3;
};

struct Experiment {
  trainers::TrainConfig train;
  DiffusionSettings diffusion;
};

// Parses the sectioned config text into an Experiment. Unknown sections or
// keys are rejected by name; missing keys take the documented defaults.
// The schema is versioned: `version` in [experiment] must be 1 if present.
Experiment parse_config(const std::string& text);
Experiment load_config_file(const std::string& path);

// Builds an Experiment from an already-parsed document (the sweep runner
// edits documents cell by cell before building them).
Experiment build_experiment(const ConfigDoc& doc);

// Canonical emitter: every key of every section, fixed order. Feeding the
// result back through parse_config reproduces the same experiment, and two
// experiments are equal iff their printed forms match byte for byte.
std::string print_config(const Experiment& exp);

diffusion::NoiseSchedule make_schedule(const DiffusionSettings& s);
diffusion::DenoiserConfig make_denoiser_config(const DiffusionSettings& s,
                                               const toydata::DistributionSpec& dist,
                                               std::uint64_t seed);

// Shortest decimal form that parses back to exactly the same double
// (used for every float this tool writes: configs, CSV cells, SVG).
std::string format_double(double v);

}  // namespace ganlab::config
