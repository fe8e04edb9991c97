#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ganlab/metrics.hpp"
#include "ganlab/rng.hpp"

using namespace ganlab;
using namespace ganlab::metrics;

namespace {

// Minimum over all pairings of the mean absolute transport cost, by
// exhaustive permutation search. Only usable for tiny n.
double w1_bruteforce(std::vector<double> xs, std::vector<double> ys) {
  std::vector<std::size_t> perm(ys.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end());
  double best = 1e300;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += std::abs(xs[i] - ys[perm[i]]);
    best = std::min(best, s / xs.size());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// KL by direct summation, written independently of metrics::kl.
double kl_direct(const std::vector<double>& p, const std::vector<double>& q, double eps) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * std::log((p[i] + eps) / (q[i] + eps));
  return acc;
}

}  // namespace

TEST_CASE("histogram bins, clipping, and normalization") {
  const Histogram h = histogram({0.1, 0.9, 0.5, -5.0, 42.0}, 2, 0.0, 1.0);
  CHECK(h.probs[0] == doctest::Approx(0.4));  // 0.1 and the clipped -5
  CHECK(h.probs[1] == doctest::Approx(0.6));  // 0.9, 0.5 (upper half-open bin), clipped 42
  double total = 0.0;
  for (double p : h.probs) total += p;
  CHECK(std::abs(total - 1.0) <= 1e-12);
  CHECK_THROWS_AS(histogram({}, 4, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(histogram({1.0}, 0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(histogram({1.0}, 4, 1, 1), std::invalid_argument);
}

TEST_CASE("kl matches direct summation and the pinned value") {
  const Histogram p = histogram_from_probs({0.5, 0.5}, 0, 1);
  const Histogram q = histogram_from_probs({0.25, 0.75}, 0, 1);
  CHECK(kl(p, q) == doctest::Approx(0.14384).epsilon(1e-4));
  CHECK(std::abs(kl(p, q) - kl_direct(p.probs, q.probs, 1e-10)) < 1e-15);
  // Asymmetry.
  CHECK(kl(p, q) != doctest::Approx(kl(q, p)).epsilon(1e-6));
  // Identical histograms give zero.
  CHECK(kl(p, p) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("js symmetry, bounds, and disjoint maximum") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(8), b(8);
    double sa = 0, sb = 0;
    for (int i = 0; i < 8; ++i) {
      a[static_cast<std::size_t>(i)] = rng.uniform01() + 1e-3;
      b[static_cast<std::size_t>(i)] = rng.uniform01() + 1e-3;
      sa += a[static_cast<std::size_t>(i)];
      sb += b[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < 8; ++i) {
      a[static_cast<std::size_t>(i)] /= sa;
      b[static_cast<std::size_t>(i)] /= sb;
    }
    const Histogram ha = histogram_from_probs(a, 0, 1);
    const Histogram hb = histogram_from_probs(b, 0, 1);
    CHECK(js(ha, hb) == doctest::Approx(js(hb, ha)).epsilon(1e-12));
    CHECK(js(ha, hb) >= 0.0);
    CHECK(js(ha, hb) <= std::log(2.0) + 1e-12);
  }
  // Disjoint support approaches ln 2.
  const Histogram p = histogram_from_probs({1.0, 0.0}, 0, 1);
  const Histogram q = histogram_from_probs({0.0, 1.0}, 0, 1);
  CHECK(js(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("w1 on sorted samples matches the assignment oracle") {
  CHECK(w1_exact({0.0, 1.0}, {0.5, 1.5}) == doctest::Approx(0.5));
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + rng.uniform_int(7);  // up to 8
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (double& x : xs) x = 3.0 * rng.normal();
    for (double& y : ys) y = 3.0 * rng.normal() + 1.0;
    CHECK(w1_exact(xs, ys) == doctest::Approx(w1_bruteforce(xs, ys)).epsilon(1e-12));
  }
  // Translation moves w1 by exactly the shift.
  std::vector<double> xs = {0.1, -0.4, 2.0, 1.1};
  std::vector<double> shifted = xs;
  for (double& x : shifted) x += 2.5;
  CHECK(w1_exact(xs, shifted) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("mode stats count covered centers and high-quality share") {
  // Two centers; all samples near the first one.
  const Tensor centers(2, 2, {0, 0, 5, 5});
  std::vector<double> sv;
  Rng rng(13);
  int within = 0;
  for (int i = 0; i < 200; ++i) {
    const double x = 0.05 * rng.normal();
    const double y = 0.05 * rng.normal();
    if (std::sqrt(x * x + y * y) <= 3.0 * 0.05) ++within;
    sv.push_back(x);
    sv.push_back(y);
  }
  // One far-away outlier.
  sv.push_back(50.0);
  sv.push_back(50.0);
  const Tensor samples(201, 2, sv);
  const ModeStats st = mode_stats(samples, centers, 0.05);
  CHECK(st.modes_covered == 1);
  CHECK(st.high_quality_fraction == doctest::Approx(within / 201.0).epsilon(1e-9));

  // A single distant sample on the second center is below min_share.
  std::vector<double> sv2(sv);
  sv2[sv2.size() - 2] = 5.0;
  sv2[sv2.size() - 1] = 5.0;
  const ModeStats st2 = mode_stats(Tensor(201, 2, sv2), centers, 0.05, 3.0, 0.01);
  CHECK(st2.modes_covered == 1);  // 1/201 < 1%
  const ModeStats st3 = mode_stats(Tensor(201, 2, sv2), centers, 0.05, 3.0, 0.001);
  CHECK(st3.modes_covered == 2);
}

TEST_CASE("d_accuracy threshold and tie handling") {
  CHECK(d_accuracy({0.9, 0.4}, {0.2, 0.6}) == doctest::Approx(0.5));
  // A fake scored exactly 0.5 counts as correctly rejected.
  CHECK(d_accuracy({0.6}, {0.5}) == doctest::Approx(1.0));
  // A real scored exactly 0.5 counts as missed.
  CHECK(d_accuracy({0.5}, {0.4}) == doctest::Approx(0.5));
}
