#pragma once

#include <array>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ganlab/rng.hpp"
#include "ganlab/tensor.hpp"

namespace ganlab::toydata {

struct Gaussian1D {
  double mean = 4.0;
  double stddev = 1.25;
};

// Equal-weight isotropic Gaussians on a circle, mode j at angle 2 pi j / k.
struct MixtureRing {
  int modes = 8;
  double radius = 2.0;
  double stddev = 0.05;
};

// side x side lattice centered on the origin.
struct MixtureGrid {
  int side = 5;
  double spacing = 2.0;
  double stddev = 0.05;
};

// Explicit 2-D centers; samples carry the index of the mode they came from.
struct LabeledMixture {
  std::vector<std::array<double, 2>> centers;
  double stddev = 0.25;
};

using DistributionSpec = std::variant<Gaussian1D, MixtureRing, MixtureGrid, LabeledMixture>;

int dim(const DistributionSpec& dist);

// Mode centers as a [k x dim] tensor (a plain Gaussian has one mode) and the
// per-mode standard deviation, for mode-coverage statistics.
Tensor mode_centers(const DistributionSpec& dist);
double mode_stddev(const DistributionSpec& dist);

LabeledMixture labeled_ring(int modes, double radius, double stddev);

Tensor sample(const DistributionSpec& dist, int n, Rng& rng);
std::pair<Tensor, std::vector<int>> sample_labeled(const LabeledMixture& dist, int n, Rng& rng);

// Log density at one point (x.size() == dim). Mixtures use a log-sum-exp
// over components.
double log_density(const DistributionSpec& dist, const std::vector<double>& x);

// Index of the nearest center for every row.
std::vector<int> labels_for(const LabeledMixture& dist, const Tensor& samples);

// Regression fixture: y = Rot(pi/4) x + 0.05 eps with x standard normal.
struct PairedSet {
  Tensor x;
  Tensor y;
};
PairedSet sample_paired(int n, Rng& rng);
// The clean map alone (no noise), for checking learned translators.
Tensor rotate_quarter_pi(const Tensor& x);

// Two unaligned domains: A is ring(8, 2, 0.05); B is an independent ring
// draw scaled by 0.5 and shifted by (2, 2).
struct TwoDomainSet {
  Tensor a;
  Tensor b;
};
TwoDomainSet sample_two_domain(int n, Rng& rng);
DistributionSpec two_domain_a();
DistributionSpec two_domain_b();  // the distribution of B-domain points

// Equal-weight 1-D Gaussian mixture, the marginal law of one axis of any
// distribution here. Used for exact histogram targets.
struct GaussMix1D {
  std::vector<double> means;
  double stddev = 1.0;
};
GaussMix1D axis_marginal(const DistributionSpec& dist, int axis);

// Exact bin masses for a histogram over [lo, hi] whose edge bins absorb the
// tails (matching the clipping convention of metrics::histogram). Sums to 1.
std::vector<double> bin_probs(const GaussMix1D& marginal, int bins, double lo, double hi);

// Reasonable per-axis histogram range for evaluating against a distribution.
std::pair<double, double> default_hist_range(const DistributionSpec& dist);

void write_csv(const std::string& path, const Tensor& samples);

}  // namespace ganlab::toydata
