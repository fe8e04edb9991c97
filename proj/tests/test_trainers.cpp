#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "ganlab/trainers.hpp"

using namespace ganlab;
using namespace ganlab::trainers;

namespace {

bool eq_or_both_nan(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

bool same_records(const std::vector<metrics::MetricsRecord>& a,
                  const std::vector<metrics::MetricsRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].step != b[i].step) return false;
    if (!eq_or_both_nan(a[i].d_loss, b[i].d_loss)) return false;
    if (!eq_or_both_nan(a[i].g_loss, b[i].g_loss)) return false;
    if (a[i].kl != b[i].kl || a[i].js != b[i].js || a[i].w1 != b[i].w1) return false;
    if (a[i].modes_covered != b[i].modes_covered) return false;
    if (a[i].high_quality_fraction != b[i].high_quality_fraction) return false;
    if (a[i].d_accuracy != b[i].d_accuracy) return false;
  }
  return true;
}

bool same_params(const nn::ParameterSet& a, const nn::ParameterSet& b) {
  if (a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].values() != b.params[i].values()) return false;
  }
  return true;
}

// A small, fast base configuration on the 1-D Gaussian.
TrainConfig tiny_gauss(models::Algorithm alg) {
  TrainConfig cfg;
  cfg.algorithm = alg;
  cfg.data = toydata::DistributionSpec{toydata::Gaussian1D{}};
  cfg.steps = 6;
  cfg.batch = 16;
  cfg.dims.z_dim = 4;
  cfg.dims.hidden = {16};
  cfg.eval_every = 3;
  cfg.eval_samples = 64;
  cfg.eval_bins = 16;
  cfg.seed = 7;
  return cfg;
}

void check_well_formed(const RunLog& log, int data_dim) {
  REQUIRE(!log.records.empty());
  CHECK(log.records.front().step == 0);
  CHECK(std::isnan(log.records.front().d_loss));
  CHECK(std::isnan(log.records.front().g_loss));
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    CHECK(log.records[i - 1].step < log.records[i].step);
  }
  for (const auto& r : log.records) {
    CHECK(std::isfinite(r.kl));
    CHECK(std::isfinite(r.js));
    CHECK(std::isfinite(r.w1));
    CHECK(r.d_accuracy >= 0.0);
    CHECK(r.d_accuracy <= 1.0);
    CHECK(r.high_quality_fraction >= 0.0);
    CHECK(r.high_quality_fraction <= 1.0);
  }
  REQUIRE(log.final_samples.defined());
  CHECK(log.final_samples.cols() == data_dim);
  CHECK(log.wall_time_s >= 0.0);
}

}  // namespace

TEST_CASE("identical configs produce bit-identical run logs") {
  TrainConfig cfg = tiny_gauss(models::Algorithm::vanilla);
  cfg.steps = 8;
  const TrainResult a = train(cfg);
  const TrainResult b = train(cfg);
  CHECK(a.log.status == "completed");
  CHECK(same_records(a.log.records, b.log.records));
  CHECK(a.log.final_samples.values() == b.log.final_samples.values());
  CHECK(same_params(a.bundle.generator.params, b.bundle.generator.params));
  CHECK(same_params(a.bundle.discriminator.params, b.bundle.discriminator.params));
}

TEST_CASE("evaluation schedule covers step zero, the period, and the end") {
  TrainConfig cfg = tiny_gauss(models::Algorithm::vanilla);
  cfg.steps = 10;
  cfg.eval_every = 4;
  const TrainResult res = train(cfg);
  REQUIRE(res.log.records.size() == 4);
  CHECK(res.log.records[0].step == 0);
  CHECK(res.log.records[1].step == 4);
  CHECK(res.log.records[2].step == 8);
  CHECK(res.log.records[3].step == 10);
  check_well_formed(res.log, 1);
}

TEST_CASE("update counters follow the critic schedule") {
  TrainConfig cfg = tiny_gauss(models::Algorithm::vanilla);
  cfg.steps = 6;
  cfg.n_critic = 2;
  const TrainResult res = train(cfg);
  CHECK(res.log.g_updates == 6);
  CHECK(res.log.d_updates == 12);
  CHECK(res.log.steps_completed == 6);

  // The critic family defaults to five critic updates per generator step.
  TrainConfig wcfg = tiny_gauss(models::Algorithm::wgan_clip);
  wcfg.steps = 2;
  CHECK(resolved_n_critic(wcfg) == 5);
  const TrainResult wres = train(wcfg);
  CHECK(wres.log.config.n_critic == 5);
  CHECK(wres.log.d_updates == 10);
  CHECK(wres.log.g_updates == 2);
}

TEST_CASE("weight-clipped critic parameters stay inside the clamp after every update") {
  TrainConfig cfg = tiny_gauss(models::Algorithm::wgan_clip);
  cfg.steps = 4;
  cfg.reg.clip_c = 0.01;
  int calls = 0;
  bool ok = true;
  TrainHooks hooks;
  hooks.on_critic_step = [&](int, int, const models::ModelBundle& b) {
    ++calls;
    for (const Tensor& t : b.discriminator.params.params) {
      for (double v : t.values()) {
        if (std::abs(v) > 0.01 + 1e-12) ok = false;
      }
    }
  };
  const TrainResult res = train(cfg, hooks);
  CHECK(res.log.status == "completed");
  CHECK(calls == 20);  // 4 steps x 5 critic updates
  CHECK(ok);
}

TEST_CASE("runaway losses end the run as diverged with a well-formed partial log") {
  TrainConfig cfg = tiny_gauss(models::Algorithm::lsgan);
  cfg.steps = 40;
  cfg.d_opt.kind = nn::OptimizerKind::sgd;
  cfg.d_opt.lr = 1e12;
  cfg.g_opt.kind = nn::OptimizerKind::sgd;
  cfg.g_opt.lr = 1e12;
  const TrainResult res = train(cfg);
  CHECK(res.log.status == "diverged");
  CHECK(res.log.steps_completed < 40);
  REQUIRE(!res.log.records.empty());
  CHECK(res.log.records.front().step == 0);
  CHECK(res.log.final_samples.defined());
}

TEST_CASE("a lookahead copy with a frozen critic reduces to the plain generator step") {
  TrainConfig base = tiny_gauss(models::Algorithm::vanilla);
  base.steps = 8;
  base.d_opt.lr = 0.0;

  TrainConfig unrolled = base;
  unrolled.unroll_k = 1;

  const TrainResult a = train(base);
  const TrainResult b = train(unrolled);
  CHECK(same_records(a.log.records, b.log.records));
  CHECK(same_params(a.bundle.generator.params, b.bundle.generator.params));
}

TEST_CASE("lookahead critic updates never touch the live discriminator") {
  TrainConfig base = tiny_gauss(models::Algorithm::vanilla);
  base.steps = 8;
  base.g_opt.lr = 0.0;  // freeze G so both runs feed the critic identical fakes

  TrainConfig unrolled = base;
  unrolled.unroll_k = 3;

  const TrainResult a = train(base);
  const TrainResult b = train(unrolled);
  CHECK(same_params(a.bundle.discriminator.params, b.bundle.discriminator.params));
}

TEST_CASE("replay buffer is a capacity-bounded reservoir") {
  Rng rng(11);
  ReplayBuffer buf(50);
  for (int i = 0; i < 10; ++i) {
    buf.insert(Tensor::filled(100, 2, static_cast<double>(i)), rng);
  }
  CHECK(buf.size() == 50);
  CHECK(buf.insertions() == 1000);
  CHECK(buf.capacity() == 50);

  // Late batches must be represented (retention is uniform over history).
  int late = 0;
  for (int i = 0; i < 200; ++i) {
    if (buf.draw(rng)[0] >= 5.0) ++late;
  }
  CHECK(late > 0);
}

TEST_CASE("replay_mix swaps in stored rows and always banks the fresh batch") {
  Rng rng(3);

  // Empty buffer: output is the fresh batch unchanged, but it gets stored.
  ReplayBuffer buf(64);
  const Tensor fresh = Tensor::filled(8, 2, 1.0);
  const Tensor out = replay_mix(buf, fresh, 0.5, rng);
  CHECK(out.values() == fresh.values());
  CHECK(buf.size() == 8);

  // Preloaded buffer: the trailing floor(frac * n) rows come from storage.
  ReplayBuffer buf2(64);
  buf2.insert(Tensor::filled(64, 2, 7.0), rng);
  const Tensor zeros(8, 2);
  const Tensor mixed = replay_mix(buf2, zeros, 0.5, rng);
  for (int r = 0; r < 4; ++r) {
    CHECK(mixed.at(r, 0) == 0.0);
    CHECK(mixed.at(4 + r, 0) == 7.0);
  }

  // mix_fraction 0: all fresh, buffer still fills.
  ReplayBuffer buf3(16);
  const Tensor out3 = replay_mix(buf3, fresh, 0.0, rng);
  CHECK(out3.values() == fresh.values());
  CHECK(buf3.size() == 8);
}

TEST_CASE("input noise is zero-mean with the configured spread") {
  Rng rng(5);
  const Tensor x = Tensor::filled(100, 200, 2.5);
  CHECK(add_input_noise(x, 0.0, rng).values() == x.values());

  const double stddev = 0.05;
  const Tensor noisy = add_input_noise(x, stddev, rng);
  const int n = static_cast<int>(x.size());
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) mean += noisy.values()[i] - 2.5;
  mean /= n;
  for (int i = 0; i < n; ++i) {
    const double d = noisy.values()[i] - 2.5 - mean;
    var += d * d;
  }
  var /= n - 1;
  CHECK(std::abs(mean) < 3.0 * stddev / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(stddev * stddev).epsilon(0.05));
}

TEST_CASE("gradient noise adds the configured perturbation") {
  Rng rng(9);
  std::vector<Tensor> grads = {Tensor::filled(250, 200, 1.0), Tensor::filled(250, 200, -1.0)};
  const std::vector<Tensor> clean = grads;
  CHECK(dp_noise(grads, 0.0, rng)[0].values() == clean[0].values());

  const std::vector<Tensor> noised = dp_noise(grads, 0.1, rng);
  double mean = 0.0, var = 0.0;
  long n = 0;
  for (std::size_t t = 0; t < noised.size(); ++t) {
    for (std::size_t i = 0; i < noised[t].size(); ++i) {
      mean += noised[t].values()[i] - clean[t].values()[i];
      ++n;
    }
  }
  mean /= static_cast<double>(n);
  for (std::size_t t = 0; t < noised.size(); ++t) {
    for (std::size_t i = 0; i < noised[t].size(); ++i) {
      const double d = noised[t].values()[i] - clean[t].values()[i] - mean;
      var += d * d;
    }
  }
  const double sample_std = std::sqrt(var / static_cast<double>(n - 1));
  CHECK(std::abs(sample_std - 0.1) < 0.003);  // 1e5 entries
}

TEST_CASE("config validation rejects inconsistent requests") {
  TrainConfig cfg = tiny_gauss(models::Algorithm::vanilla);
  cfg.batch = 15;
  cfg.dims.pack_k = 2;
  CHECK_THROWS_AS(train(cfg), std::invalid_argument);

  TrainConfig cg = tiny_gauss(models::Algorithm::cgan);
  CHECK_THROWS_AS(train(cg), std::invalid_argument);  // needs a labeled mixture

  TrainConfig rep = tiny_gauss(models::Algorithm::cgan);
  rep.data = toydata::DistributionSpec{toydata::labeled_ring(3, 1.0, 0.1)};
  rep.dims.data_dim = 2;
  rep.reg.replay_capacity = 10;
  CHECK_THROWS_AS(train(rep), std::invalid_argument);  // replay is unconditional-only

  TrainConfig mismatch = tiny_gauss(models::Algorithm::vanilla);
  mismatch.dims.data_dim = 3;
  CHECK_THROWS_AS(train(mismatch), std::invalid_argument);

  TrainConfig info = tiny_gauss(models::Algorithm::infogan);
  info.data = toydata::DistributionSpec{toydata::MixtureRing{4, 1.0, 0.1}};
  info.dims.data_dim = 2;
  CHECK_THROWS_AS(train(info), std::invalid_argument);  // code_k missing

  CHECK(resolved_n_critic(tiny_gauss(models::Algorithm::vanilla)) == 1);
  CHECK(resolved_n_critic(tiny_gauss(models::Algorithm::wgan_gp)) == 5);
}

TEST_CASE("stabilizer stack runs end to end") {
  TrainConfig cfg = tiny_gauss(models::Algorithm::vanilla);
  cfg.reg.smoothing = {0.9, 0.1};
  cfg.reg.input_noise_std = 0.05;
  cfg.reg.dp_noise_std = 0.01;
  cfg.reg.replay_capacity = 128;
  cfg.reg.replay_mix_fraction = 0.25;
  cfg.reg.feature_matching_weight = 0.5;
  cfg.reg.grad_clip_mode = nn::ClipMode::norm;
  cfg.reg.grad_clip_bound = 10.0;
  cfg.dims.pack_k = 2;
  cfg.unroll_k = 2;
  const TrainResult res = train(cfg);
  CHECK(res.log.status == "completed");
  check_well_formed(res.log, 1);

  // Still deterministic with every stabilizer on.
  const TrainResult res2 = train(cfg);
  CHECK(same_records(res.log.records, res2.log.records));
}

TEST_CASE("spectral norm flag wires power-iteration state through training") {
  TrainConfig cfg = tiny_gauss(models::Algorithm::hinge);
  cfg.reg.spectral_norm = true;
  cfg.steps = 4;
  const TrainResult res = train(cfg);
  CHECK(res.log.status == "completed");
  REQUIRE(!res.bundle.discriminator.params.sn_u.empty());
  for (const Tensor& u : res.bundle.discriminator.params.sn_u) {
    double norm = 0.0;
    for (double v : u.values()) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("every algorithm completes a short run with a sane log") {
  const int kSteps = 5;
  for (models::Algorithm alg : models::all_algorithms()) {
    CAPTURE(models::algorithm_name(alg));
    TrainConfig cfg;
    cfg.algorithm = alg;
    cfg.steps = kSteps;
    cfg.batch = 16;
    cfg.n_critic = 1;
    cfg.dims.z_dim = 4;
    cfg.dims.hidden = {16};
    cfg.eval_every = 100;  // step 0 and the final step only
    cfg.eval_samples = 64;
    cfg.eval_bins = 16;
    cfg.seed = 21;
    int expect_dim = 2;
    switch (alg) {
      case models::Algorithm::cgan:
        cfg.data = toydata::DistributionSpec{toydata::labeled_ring(3, 1.0, 0.1)};
        break;
      case models::Algorithm::infogan:
        cfg.data = toydata::DistributionSpec{toydata::MixtureRing{4, 1.0, 0.1}};
        cfg.dims.code_k = 4;
        break;
      case models::Algorithm::pix2pix_toy:
        cfg.data = PairedData{};
        break;
      case models::Algorithm::cyclegan_toy:
        cfg.data = TwoDomainData{};
        break;
      case models::Algorithm::vanilla:
      case models::Algorithm::ebgan:
      case models::Algorithm::aae:
        cfg.data = toydata::DistributionSpec{toydata::Gaussian1D{}};
        expect_dim = 1;
        break;
      default:
        cfg.data = toydata::DistributionSpec{toydata::MixtureRing{4, 1.0, 0.1}};
        break;
    }
    const TrainResult res = train(cfg);
    CHECK(res.log.status == "completed");
    CHECK(res.log.g_updates == kSteps);
    CHECK(res.log.d_updates == kSteps);
    REQUIRE(res.log.records.size() == 2);
    check_well_formed(res.log, expect_dim);
  }
}

TEST_CASE("conditional and coded generation produce one row per request") {
  TrainConfig cfg = tiny_gauss(models::Algorithm::cgan);
  cfg.data = toydata::DistributionSpec{toydata::labeled_ring(3, 1.0, 0.1)};
  cfg.dims.data_dim = 2;
  cfg.steps = 2;
  const TrainResult res = train(cfg);
  Rng rng(42);
  const Tensor by_label = generate_with_labels(res.bundle, {0, 1, 2, 0}, rng);
  CHECK(by_label.rows() == 4);
  CHECK(by_label.cols() == 2);

  TrainConfig icfg = tiny_gauss(models::Algorithm::infogan);
  icfg.data = toydata::DistributionSpec{toydata::MixtureRing{4, 1.0, 0.1}};
  icfg.dims.data_dim = 2;
  icfg.dims.code_k = 4;
  icfg.steps = 2;
  const TrainResult ires = train(icfg);
  const Tensor by_code = generate_with_codes(ires.bundle, {3, 1}, rng);
  CHECK(by_code.rows() == 2);
  CHECK(by_code.cols() == 2);
}
