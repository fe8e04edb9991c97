#include "ganlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ganlab::metrics {

Histogram histogram(const std::vector<double>& samples, int bins, double lo, double hi) {
  if (bins <= 0) throw std::invalid_argument("histogram: bins must be positive");
  if (!(hi > lo)) throw std::invalid_argument("histogram: need hi > lo");
  if (samples.empty()) throw std::invalid_argument("histogram: no samples");
  Histogram h;
  h.bins = bins;
  h.lo = lo;
  h.hi = hi;
  h.probs.assign(static_cast<std::size_t>(bins), 0.0);
  const double w = (hi - lo) / bins;
  const double share = 1.0 / static_cast<double>(samples.size());
  for (double x : samples) {
    int b = static_cast<int>(std::floor((x - lo) / w));
    b = std::min(std::max(b, 0), bins - 1);
    h.probs[static_cast<std::size_t>(b)] += share;
  }
  return h;
}

Histogram histogram_from_probs(std::vector<double> probs, double lo, double hi) {
  if (probs.empty()) throw std::invalid_argument("histogram_from_probs: empty");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("histogram_from_probs: negative mass");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("histogram_from_probs: masses sum to " + std::to_string(total));
  Histogram h;
  h.bins = static_cast<int>(probs.size());
  h.lo = lo;
  h.hi = hi;
  h.probs = std::move(probs);
  return h;
}

namespace {
void require_same_binning(const char* who, const Histogram& p, const Histogram& q) {
  if (p.bins != q.bins || p.lo != q.lo || p.hi != q.hi)
    throw std::invalid_argument(std::string(who) + ": histograms use different binnings");
}
}  // namespace

double kl(const Histogram& p, const Histogram& q, double eps) {
  require_same_binning("kl", p, q);
  double d = 0.0;
  for (int i = 0; i < p.bins; ++i) {
    const double pi = p.probs[static_cast<std::size_t>(i)];
    const double qi = q.probs[static_cast<std::size_t>(i)];
    d += pi * std::log((pi + eps) / (qi + eps));
  }
  return d;
}

double js(const Histogram& p, const Histogram& q) {
  require_same_binning("js", p, q);
  Histogram m = p;
  for (int i = 0; i < p.bins; ++i)
    m.probs[static_cast<std::size_t>(i)] =
        0.5 * (p.probs[static_cast<std::size_t>(i)] + q.probs[static_cast<std::size_t>(i)]);
  return 0.5 * kl(p, m) + 0.5 * kl(q, m);
}

double w1_exact(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("w1_exact: needs equal-size nonempty samples");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += std::abs(xs[i] - ys[i]);
  return s / static_cast<double>(xs.size());
}

ModeStats mode_stats(const Tensor& samples, const Tensor& centers, double stddev,
                     double radius_mult, double min_share) {
  if (samples.cols() != centers.cols())
    throw std::invalid_argument("mode_stats: samples are " + samples.shape_str() +
                                " but centers are " + centers.shape_str());
  if (stddev <= 0.0) throw std::invalid_argument("mode_stats: stddev must be positive");
  const int n = samples.rows(), k = centers.rows(), d = samples.cols();
  const double radius2 = radius_mult * stddev * radius_mult * stddev;
  std::vector<int> close_hits(static_cast<std::size_t>(k), 0);
  int hq = 0;
  for (int i = 0; i < n; ++i) {
    double best = 0.0;
    int arg = -1;
    for (int c = 0; c < k; ++c) {
      double d2 = 0.0;
      for (int j = 0; j < d; ++j) {
        const double delta = samples.at(i, j) - centers.at(c, j);
        d2 += delta * delta;
      }
      if (arg < 0 || d2 < best) {
        best = d2;
        arg = c;
      }
    }
    if (best <= radius2) {
      ++close_hits[static_cast<std::size_t>(arg)];
      ++hq;
    }
  }
  ModeStats out;
  const double need = min_share * n;
  for (int c = 0; c < k; ++c)
    if (close_hits[static_cast<std::size_t>(c)] >= need && close_hits[static_cast<std::size_t>(c)] > 0)
      ++out.modes_covered;
  out.high_quality_fraction = n > 0 ? static_cast<double>(hq) / n : 0.0;
  return out;
}

double d_accuracy(const std::vector<double>& p_real, const std::vector<double>& p_fake) {
  if (p_real.empty() && p_fake.empty())
    throw std::invalid_argument("d_accuracy: no predictions");
  long correct = 0;
  for (double p : p_real)
    if (p > 0.5) ++correct;
  for (double p : p_fake)
    if (p <= 0.5) ++correct;
  return static_cast<double>(correct) / static_cast<double>(p_real.size() + p_fake.size());
}

}  // namespace ganlab::metrics
