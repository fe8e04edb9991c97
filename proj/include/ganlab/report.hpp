#pragma once

#include <string>
#include <vector>

#include "ganlab/config.hpp"
#include "ganlab/metrics.hpp"
#include "ganlab/trainers.hpp"

namespace ganlab::report {

// Exact per-axis marginal law and histogram range for any data source;
// the same targets the trainer scores its evaluation rounds against.
struct AxisTarget {
  toydata::GaussMix1D marginal;
  double lo = 0.0;
  double hi = 0.0;
};
std::vector<AxisTarget> axis_targets(const trainers::DataSpec& data);

// Distribution-fit summary for a set of generated rows: per-axis-averaged
// divergences against the exact marginals plus mode coverage. `rng` draws
// the held-out reference sample for the transport distance.
struct SampleFit {
  double kl = 0.0;
  double js = 0.0;
  double w1 = 0.0;
  int modes_covered = 0;
  double high_quality_fraction = 0.0;
};
SampleFit evaluate_samples(const Tensor& fake, const trainers::DataSpec& data, int bins,
                           Rng& rng);

// One row per evaluation round; floats in shortest round-trip form.
std::string metrics_csv(const std::vector<metrics::MetricsRecord>& records);

// Header "x0" (1-D) or "x0,x1" (2-D), one generated point per row.
std::string samples_csv(const Tensor& samples);

// Machine-readable run summary: status, counters, the canonical config
// echo, and every logged metrics row.
std::string runlog_json(const config::Experiment& exp, const trainers::RunLog& log);

// Self-contained SVG: per-axis bars of the generated sample histogram with
// the exact target bin masses drawn as a line over them.
std::string histogram_svg(const Tensor& samples, const trainers::DataSpec& data, int bins);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace ganlab::report
