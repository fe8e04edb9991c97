#pragma once

#include <limits>
#include <vector>

#include "ganlab/tensor.hpp"

namespace ganlab::metrics {

// Uniform-bin probability histogram over [lo, hi]. Samples outside the range
// are clipped into the edge bins, so probs always sums to 1.
struct Histogram {
  int bins = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> probs;
};

Histogram histogram(const std::vector<double>& samples, int bins, double lo, double hi);

// Wrap precomputed bin masses (an exact target law) in the same type.
Histogram histogram_from_probs(std::vector<double> probs, double lo, double hi);

// KL(p || q) = sum p_i ln((p_i + eps) / (q_i + eps)), natural log. Histograms
// must share binning.
double kl(const Histogram& p, const Histogram& q, double eps = 1e-10);

// Jensen-Shannon divergence via the mixture m = (p + q) / 2; symmetric and
// bounded by ln 2.
double js(const Histogram& p, const Histogram& q);

// Exact 1-D Wasserstein-1 between equal-size samples: mean absolute gap
// between sorted values.
double w1_exact(std::vector<double> xs, std::vector<double> ys);

struct ModeStats {
  int modes_covered = 0;
  double high_quality_fraction = 0.0;
};

// Assign each sample to its nearest center. A center counts as covered when
// at least min_share of all samples land within radius_mult * stddev of it;
// high_quality_fraction is the share of samples within that radius of their
// own center.
ModeStats mode_stats(const Tensor& samples, const Tensor& centers, double stddev,
                     double radius_mult = 3.0, double min_share = 0.01);

// Share of correct discriminator calls at threshold 0.5 over held-out
// batches; a fake scored exactly 0.5 counts as called correctly.
double d_accuracy(const std::vector<double>& p_real, const std::vector<double>& p_fake);

// One evaluation snapshot of a training run. Loss fields are NaN when the
// snapshot precedes the first update (the step-0 record).
struct MetricsRecord {
  long step = 0;
  double d_loss = std::numeric_limits<double>::quiet_NaN();
  double g_loss = std::numeric_limits<double>::quiet_NaN();
  double kl = 0.0;
  double js = 0.0;
  double w1 = 0.0;
  int modes_covered = 0;
  double high_quality_fraction = 0.0;
  double d_accuracy = 0.0;
};

}  // namespace ganlab::metrics
