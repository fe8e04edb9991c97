#include "ganlab/toydata.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "ganlab/numfmt.hpp"

namespace ganlab::toydata {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::array<double, 2>> ring_centers(int modes, double radius) {
  if (modes <= 0) throw std::invalid_argument("ring: modes must be positive");
  std::vector<std::array<double, 2>> c(static_cast<std::size_t>(modes));
  for (int j = 0; j < modes; ++j) {
    const double a = kTwoPi * j / modes;
    c[static_cast<std::size_t>(j)] = {radius * std::cos(a), radius * std::sin(a)};
  }
  return c;
}

std::vector<std::array<double, 2>> grid_centers(int side, double spacing) {
  if (side <= 0) throw std::invalid_argument("grid: side must be positive");
  std::vector<std::array<double, 2>> c;
  c.reserve(static_cast<std::size_t>(side) * side);
  const double half = (side - 1) / 2.0;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j)
      c.push_back({spacing * (i - half), spacing * (j - half)});
  return c;
}

std::vector<std::array<double, 2>> centers_of(const DistributionSpec& dist) {
  return std::visit(
      [](const auto& d) -> std::vector<std::array<double, 2>> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Gaussian1D>) {
          return {{d.mean, 0.0}};
        } else if constexpr (std::is_same_v<T, MixtureRing>) {
          return ring_centers(d.modes, d.radius);
        } else if constexpr (std::is_same_v<T, MixtureGrid>) {
          return grid_centers(d.side, d.spacing);
        } else {
          if (d.centers.empty())
            throw std::invalid_argument("LabeledMixture: needs at least one center");
          return d.centers;
        }
      },
      dist);
}

double normal_log_pdf(double x, double mean, double stddev) {
  const double z = (x - mean) / stddev;
  return -0.5 * z * z - std::log(stddev * std::sqrt(kTwoPi));
}

double log_sum_exp(const std::vector<double>& xs) {
  double mx = xs[0];
  for (double x : xs) mx = std::max(mx, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Standard normal CDF.
double phi(double z) { return 0.5 * (1.0 + std::erf(z / std::numbers::sqrt2)); }

}  // namespace

int dim(const DistributionSpec& dist) {
  return std::holds_alternative<Gaussian1D>(dist) ? 1 : 2;
}

Tensor mode_centers(const DistributionSpec& dist) {
  const auto cs = centers_of(dist);
  const int d = dim(dist);
  std::vector<double> v;
  v.reserve(cs.size() * static_cast<std::size_t>(d));
  for (const auto& c : cs) {
    v.push_back(c[0]);
    if (d == 2) v.push_back(c[1]);
  }
  return Tensor(static_cast<int>(cs.size()), d, std::move(v));
}

double mode_stddev(const DistributionSpec& dist) {
  return std::visit([](const auto& d) { return d.stddev; }, dist);
}

LabeledMixture labeled_ring(int modes, double radius, double stddev) {
  LabeledMixture m;
  m.centers = ring_centers(modes, radius);
  m.stddev = stddev;
  return m;
}

Tensor sample(const DistributionSpec& dist, int n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("sample: n must be positive");
  if (const auto* g = std::get_if<Gaussian1D>(&dist)) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = g->mean + g->stddev * rng.normal();
    return Tensor(n, 1, std::move(v));
  }
  const auto cs = centers_of(dist);
  const double sd = mode_stddev(dist);
  std::vector<double> v(static_cast<std::size_t>(n) * 2);
  for (int i = 0; i < n; ++i) {
    const auto& c = cs[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(cs.size())))];
    v[static_cast<std::size_t>(2 * i)] = c[0] + sd * rng.normal();
    v[static_cast<std::size_t>(2 * i) + 1] = c[1] + sd * rng.normal();
  }
  return Tensor(n, 2, std::move(v));
}

std::pair<Tensor, std::vector<int>> sample_labeled(const LabeledMixture& dist, int n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("sample_labeled: n must be positive");
  if (dist.centers.empty())
    throw std::invalid_argument("sample_labeled: needs at least one center");
  std::vector<double> v(static_cast<std::size_t>(n) * 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int k = rng.uniform_int(static_cast<int>(dist.centers.size()));
    labels[static_cast<std::size_t>(i)] = k;
    const auto& c = dist.centers[static_cast<std::size_t>(k)];
    v[static_cast<std::size_t>(2 * i)] = c[0] + dist.stddev * rng.normal();
    v[static_cast<std::size_t>(2 * i) + 1] = c[1] + dist.stddev * rng.normal();
  }
  return {Tensor(n, 2, std::move(v)), std::move(labels)};
}

double log_density(const DistributionSpec& dist, const std::vector<double>& x) {
  const int d = dim(dist);
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("log_density: point has dimension " + std::to_string(x.size()) +
                                ", distribution has " + std::to_string(d));
  if (const auto* g = std::get_if<Gaussian1D>(&dist))
    return normal_log_pdf(x[0], g->mean, g->stddev);
  const auto cs = centers_of(dist);
  const double sd = mode_stddev(dist);
  std::vector<double> terms;
  terms.reserve(cs.size());
  for (const auto& c : cs)
    terms.push_back(normal_log_pdf(x[0], c[0], sd) + normal_log_pdf(x[1], c[1], sd) -
                    std::log(static_cast<double>(cs.size())));
  return log_sum_exp(terms);
}

std::vector<int> labels_for(const LabeledMixture& dist, const Tensor& samples) {
  if (samples.cols() != 2)
    throw std::invalid_argument("labels_for: samples must be [n x 2], got " + samples.shape_str());
  std::vector<int> out(static_cast<std::size_t>(samples.rows()));
  for (int i = 0; i < samples.rows(); ++i) {
    double best = 0.0;
    int arg = -1;
    for (std::size_t k = 0; k < dist.centers.size(); ++k) {
      const double dx = samples.at(i, 0) - dist.centers[k][0];
      const double dy = samples.at(i, 1) - dist.centers[k][1];
      const double d2 = dx * dx + dy * dy;
      if (arg < 0 || d2 < best) {
        best = d2;
        arg = static_cast<int>(k);
      }
    }
    out[static_cast<std::size_t>(i)] = arg;
  }
  return out;
}

PairedSet sample_paired(int n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("sample_paired: n must be positive");
  std::vector<double> xs(static_cast<std::size_t>(n) * 2);
  for (double& v : xs) v = rng.normal();
  Tensor x(n, 2, std::move(xs));
  Tensor clean = rotate_quarter_pi(x);
  std::vector<double> ys = clean.values();
  for (double& v : ys) v += 0.05 * rng.normal();
  return {std::move(x), Tensor(n, 2, std::move(ys))};
}

Tensor rotate_quarter_pi(const Tensor& x) {
  if (x.cols() != 2)
    throw std::invalid_argument("rotate_quarter_pi: expects [n x 2], got " + x.shape_str());
  const double c = std::cos(std::numbers::pi / 4), s = std::sin(std::numbers::pi / 4);
  std::vector<double> v(x.size());
  for (int i = 0; i < x.rows(); ++i) {
    v[static_cast<std::size_t>(2 * i)] = c * x.at(i, 0) - s * x.at(i, 1);
    v[static_cast<std::size_t>(2 * i) + 1] = s * x.at(i, 0) + c * x.at(i, 1);
  }
  return Tensor(x.rows(), 2, std::move(v));
}

DistributionSpec two_domain_a() { return MixtureRing{8, 2.0, 0.05}; }

DistributionSpec two_domain_b() {
  LabeledMixture b;
  for (const auto& c : ring_centers(8, 2.0))
    b.centers.push_back({0.5 * c[0] + 2.0, 0.5 * c[1] + 2.0});
  b.stddev = 0.025;
  return b;
}

TwoDomainSet sample_two_domain(int n, Rng& rng) {
  const DistributionSpec a = two_domain_a();
  Tensor av = sample(a, n, rng);
  // B points are independent draws, not transformed copies of the A batch.
  Tensor raw = sample(a, n, rng);
  std::vector<double> bv = raw.values();
  for (std::size_t i = 0; i < bv.size(); ++i) bv[i] = 0.5 * bv[i] + 2.0;
  return {std::move(av), Tensor(n, 2, std::move(bv))};
}

GaussMix1D axis_marginal(const DistributionSpec& dist, int axis) {
  const int d = dim(dist);
  if (axis < 0 || axis >= d)
    throw std::invalid_argument("axis_marginal: axis " + std::to_string(axis) +
                                " out of range for dimension " + std::to_string(d));
  GaussMix1D m;
  if (const auto* g = std::get_if<Gaussian1D>(&dist)) {
    m.means = {g->mean};
    m.stddev = g->stddev;
    return m;
  }
  for (const auto& c : centers_of(dist)) m.means.push_back(c[static_cast<std::size_t>(axis)]);
  m.stddev = mode_stddev(dist);
  return m;
}

std::vector<double> bin_probs(const GaussMix1D& marginal, int bins, double lo, double hi) {
  if (bins <= 0) throw std::invalid_argument("bin_probs: bins must be positive");
  if (!(hi > lo)) throw std::invalid_argument("bin_probs: need hi > lo");
  if (marginal.means.empty() || marginal.stddev <= 0.0)
    throw std::invalid_argument("bin_probs: malformed marginal");
  const double w = (hi - lo) / bins;
  std::vector<double> p(static_cast<std::size_t>(bins), 0.0);
  for (double mu : marginal.means) {
    for (int b = 0; b < bins; ++b) {
      // Edge bins absorb the tails, mirroring the sample histogram's clipping.
      const double zlo = b == 0 ? -1e30 : (lo + b * w - mu) / marginal.stddev;
      const double zhi = b == bins - 1 ? 1e30 : (lo + (b + 1) * w - mu) / marginal.stddev;
      p[static_cast<std::size_t>(b)] += phi(zhi) - phi(zlo);
    }
  }
  const double inv = 1.0 / static_cast<double>(marginal.means.size());
  for (double& x : p) x *= inv;
  return p;
}

std::pair<double, double> default_hist_range(const DistributionSpec& dist) {
  return std::visit(
      [](const auto& d) -> std::pair<double, double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Gaussian1D>) {
          return {d.mean - 4.8 * d.stddev, d.mean + 4.8 * d.stddev};
        } else if constexpr (std::is_same_v<T, MixtureRing>) {
          return {-d.radius - 1.0, d.radius + 1.0};
        } else if constexpr (std::is_same_v<T, MixtureGrid>) {
          const double reach = (d.side - 1) / 2.0 * d.spacing;
          return {-reach - 1.0, reach + 1.0};
        } else {
          double lo = d.centers[0][0], hi = d.centers[0][0];
          for (const auto& c : d.centers) {
            lo = std::min({lo, c[0], c[1]});
            hi = std::max({hi, c[0], c[1]});
          }
          return {lo - 1.0, hi + 1.0};
        }
      },
      dist);
}

void write_csv(const std::string& path, const Tensor& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (int j = 0; j < samples.cols(); ++j) out << (j ? "," : "") << "x" << j;
  out << "\n";
  for (int i = 0; i < samples.rows(); ++i) {
    for (int j = 0; j < samples.cols(); ++j)
      out << (j ? "," : "") << format_double(samples.at(i, j));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace ganlab::toydata
