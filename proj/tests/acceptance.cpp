// Acceptance harness: runs the project's numbered acceptance checks, prints
// one PASS/FAIL line per criterion, and exits nonzero if any selected
// criterion fails. Usage: acceptance [criterion numbers...] (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ganlab/cli.hpp"
#include "ganlab/config.hpp"
#include "ganlab/diffusion.hpp"
#include "ganlab/gradcheck.hpp"
#include "ganlab/report.hpp"
#include "ganlab/trainers.hpp"

using namespace ganlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5};

std::string fmt(double v) { return config::format_double(v); }

double median_int(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::pair<double, double> column_mean_std(const Tensor& t, int col) {
  double sum = 0.0;
  for (int r = 0; r < t.rows(); ++r) sum += t.at(r, col);
  const double mean = sum / t.rows();
  double ss = 0.0;
  for (int r = 0; r < t.rows(); ++r) {
    const double d = t.at(r, col) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / t.rows())};
}

// Eval-mode forward that works on a const parameter snapshot.
Tensor eval_forward(const models::Network& net, const Tensor& x) {
  nn::ParameterSet params = net.params;
  return nn::forward(net.spec, params, x, nn::Mode::eval).output;
}

double top_singular_value(const Tensor& w) {
  Eigen::MatrixXd m(w.rows(), w.cols());
  for (int r = 0; r < w.rows(); ++r)
    for (int c = 0; c < w.cols(); ++c) m(r, c) = w.at(r, c);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double mean_abs_gap(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) s += std::fabs(av[i] - bv[i]);
  return s / static_cast<double>(av.size());
}

// ---- criterion 1: finite-difference oracle over every op and loss --------

bool criterion1(std::string& detail) {
  const auto t0 = Clock::now();
  const GradCheckReport ops = gradcheck_ops(100, 12345);
  const GradCheckReport losses = gradcheck_losses(100, 54321);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  int n_cases = 0;
  std::string fails;
  const bool all = ops.all_pass && losses.all_pass;
  for (const auto& rep : {ops, losses})
    for (const auto& c : rep.cases) {
      worst = std::max(worst, c.worst_err);
      n_cases += c.cases;
      if (!c.pass) fails += " FAIL:" + c.name;
    }
  const bool in_time = secs < 30.0;
  detail = std::to_string(ops.cases.size()) + " ops + " + std::to_string(losses.cases.size()) +
           " losses, " + std::to_string(n_cases) + " cases, worst_err=" + fmt(worst) + ", " +
           fmt(secs) + "s" + fails;
  return all && in_time;
}

// ---- criterion 2: gradient-of-gradient against finite differences --------

bool criterion2(std::string& detail) {
  double worst = 0.0;
  const bool pass = gradcheck_double_backprop(777, 1e-4, 1e-8, &worst);
  detail = "two-layer tanh net, worst_err=" + fmt(worst) + " at rtol 1e-4";
  return pass;
}

// ---- criteria 3 and 4: 1-D Gaussian fit and the 50% equilibrium ----------

struct GaussianRun {
  std::uint64_t seed = 0;
  bool fit = false;
  double mean = 0.0, stddev = 0.0, js = 0.0, d_acc = 0.0;
  std::string status;
};

const std::vector<GaussianRun>& gaussian_runs(double* total_secs) {
  static std::vector<GaussianRun> cache;
  static double cached_secs = 0.0;
  if (cache.empty()) {
    const auto t0 = Clock::now();
    for (std::uint64_t seed : kSeeds) {
      trainers::TrainConfig cfg;
      cfg.algorithm = models::Algorithm::vanilla;
      cfg.data = toydata::DistributionSpec(toydata::Gaussian1D{});
      cfg.steps = 5000;
      cfg.batch = 64;
      cfg.dims.z_dim = 8;
      cfg.dims.hidden = {128};
      cfg.eval_every = 1000;
      cfg.eval_samples = 2000;
      cfg.eval_bins = 64;  // over the default [-2, 10] range
      cfg.seed = seed;
      const trainers::TrainResult res = trainers::train(cfg);
      GaussianRun run;
      run.seed = seed;
      run.status = res.log.status;
      if (res.log.status == "completed") {
        const auto [m, s] = column_mean_std(res.log.final_samples, 0);
        run.mean = m;
        run.stddev = s;
        run.js = res.log.records.back().js;
        run.d_acc = res.log.records.back().d_accuracy;
        run.fit = std::fabs(m - 4.0) < 0.5 && std::fabs(s - 1.25) < 0.5 && run.js < 0.15;
      }
      cache.push_back(run);
    }
    cached_secs = seconds_since(t0);
  }
  if (total_secs) *total_secs = cached_secs;
  return cache;
}

bool criterion3(std::string& detail) {
  double secs = 0.0;
  const auto& runs = gaussian_runs(&secs);
  int passed = 0;
  std::ostringstream d;
  for (const auto& r : runs) {
    passed += r.fit;
    d << " s" << r.seed << (r.fit ? ":ok" : ":miss") << "(mean=" << fmt(r.mean)
      << ",sd=" << fmt(r.stddev) << ",js=" << fmt(r.js) << ")";
  }
  const bool in_time = secs < 120.0;
  detail = std::to_string(passed) + "/5 seeds fit, " + fmt(secs) + "s;" + d.str();
  return passed >= 4 && in_time;
}

bool criterion4(std::string& detail) {
  const auto& runs = gaussian_runs(nullptr);
  int checked = 0, ok = 0;
  std::ostringstream d;
  for (const auto& r : runs) {
    if (!r.fit) continue;
    ++checked;
    const bool in_band = r.d_acc >= 0.35 && r.d_acc <= 0.65;
    ok += in_band;
    d << " s" << r.seed << ":d_acc=" << fmt(r.d_acc) << (in_band ? "" : "(out)");
  }
  detail = std::to_string(ok) + "/" + std::to_string(checked) +
           " fitted seeds inside [0.35,0.65];" + d.str();
  return checked > 0 && ok == checked;
}

// ---- criterion 5: gradient-penalty critic shrinks transport cost ---------

bool criterion5(std::string& detail) {
  const auto t0 = Clock::now();
  int diverged = 0, reduced = 0;
  std::ostringstream d;
  for (std::uint64_t seed : kSeeds) {
    trainers::TrainConfig cfg;
    cfg.algorithm = models::Algorithm::wgan_gp;
    cfg.data = toydata::DistributionSpec(toydata::MixtureRing{});
    cfg.steps = 3500;
    cfg.batch = 64;
    cfg.n_critic = 5;
    cfg.dims.z_dim = 8;
    cfg.dims.hidden = {64, 64};
    cfg.d_opt.lr = 1e-3;
    cfg.g_opt.beta2 = 0.9;
    cfg.d_opt.beta2 = 0.9;
    cfg.reg.gp_lambda = 10.0;
    cfg.eval_every = 500;
    cfg.eval_samples = 2000;
    cfg.seed = seed;
    const trainers::TrainResult res = trainers::train(cfg);
    const double w1_start = res.log.records.front().w1;
    const double w1_final = res.log.records.back().w1;
    if (res.log.status != "completed") {
      ++diverged;
      d << " s" << seed << ":diverged";
      continue;
    }
    const bool ok = w1_final <= 0.5 * w1_start;
    reduced += ok;
    d << " s" << seed << ":" << fmt(w1_start) << "->" << fmt(w1_final) << (ok ? "" : "(short)");
  }
  const double secs = seconds_since(t0);
  detail = std::to_string(reduced) + "/5 reduced >=50%, " + std::to_string(diverged) +
           " diverged, " + fmt(secs) + "s;" + d.str();
  return diverged == 0 && reduced == 5 && secs < 300.0;
}

// ---- criterion 6: weight clamp holds after every critic step -------------

bool criterion6(std::string& detail) {
  trainers::TrainConfig cfg;
  cfg.algorithm = models::Algorithm::wgan_clip;
  cfg.data = toydata::DistributionSpec(toydata::Gaussian1D{});
  cfg.steps = 300;
  cfg.batch = 64;
  cfg.dims.z_dim = 8;
  cfg.dims.hidden = {64};
  cfg.g_opt.kind = nn::OptimizerKind::rmsprop;
  cfg.g_opt.lr = 5e-5;
  cfg.d_opt.kind = nn::OptimizerKind::rmsprop;
  cfg.d_opt.lr = 5e-5;
  cfg.eval_every = 150;
  cfg.eval_samples = 512;
  cfg.seed = 3;
  long calls = 0;
  double worst = 0.0;
  trainers::TrainHooks hooks;
  hooks.on_critic_step = [&](int, int, const models::ModelBundle& bundle) {
    ++calls;
    for (const Tensor& p : bundle.discriminator.params.params)
      for (double v : p.values()) worst = std::max(worst, std::fabs(v));
  };
  const trainers::TrainResult res = trainers::train(cfg, hooks);
  detail = std::to_string(calls) + " critic steps, max|param|=" + fmt(worst) +
           " (bound 0.01), status=" + res.log.status;
  return res.log.status == "completed" && calls == 1500 && worst <= 0.01 + 1e-12;
}

// ---- criterion 7: lookahead and packing out-cover the plain recipe -------

bool criterion7(std::string& detail) {
  const auto t0 = Clock::now();
  auto ring_run = [&](std::uint64_t seed, int unroll_k, int pack_k) {
    trainers::TrainConfig cfg;
    cfg.algorithm = models::Algorithm::vanilla;
    cfg.data = toydata::DistributionSpec(toydata::MixtureRing{});
    cfg.steps = 2000;
    cfg.batch = 64;
    cfg.unroll_k = unroll_k;
    cfg.dims.z_dim = 8;
    cfg.dims.hidden = {128};
    cfg.dims.pack_k = pack_k;
    cfg.g_opt.lr = 1e-3;
    cfg.d_opt.lr = 1e-3;
    cfg.eval_every = 1000;
    cfg.eval_samples = 2000;
    cfg.seed = seed;
    const trainers::TrainResult res = trainers::train(cfg);
    return res.log.records.back().modes_covered;
  };
  std::vector<int> plain, unroll, pack;
  std::ostringstream d;
  for (std::uint64_t seed : kSeeds) {
    plain.push_back(ring_run(seed, 0, 1));
    unroll.push_back(ring_run(seed, 5, 1));
    pack.push_back(ring_run(seed, 0, 2));
    d << " s" << seed << ":" << plain.back() << "/" << unroll.back() << "/" << pack.back();
  }
  const double m_plain = median_int(plain), m_unroll = median_int(unroll),
               m_pack = median_int(pack);
  const double secs = seconds_since(t0);
  detail = "medians plain=" + fmt(m_plain) + " unroll5=" + fmt(m_unroll) +
           " pack2=" + fmt(m_pack) + ", " + fmt(secs) + "s; per-seed plain/unroll/pack:" +
           d.str();
  return m_unroll >= 7.0 && m_pack >= 7.0 && m_unroll > m_plain && m_pack > m_plain &&
         secs < 600.0;
}

// ---- criterion 8: power iteration pins the top singular value ------------

bool criterion8(std::string& detail) {
  nn::NetworkSpec spec;
  spec.layer_sizes = {2, 128, 128, 1};
  spec.spectral_norm = true;
  nn::ParameterSet params = nn::init_network(spec, 99);
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> xv(64 * 2);
    for (double& x : xv) x = rng.normal();
    nn::forward(spec, params, Tensor(64, 2, xv), nn::Mode::train);
  }
  double lo = 2.0, hi = 0.0;
  for (int l = 0; l < spec.num_layers(); ++l) {
    const Tensor& w = params.params[static_cast<std::size_t>(2 * l)];
    const nn::SpectralResult r =
        nn::spectral_normalize(w, params.sn_u[static_cast<std::size_t>(l)], 0);
    const double sigma = top_singular_value(r.w_hat);
    lo = std::min(lo, sigma);
    hi = std::max(hi, sigma);
  }
  detail = "effective sigma range [" + fmt(lo) + ", " + fmt(hi) +
           "] across 3 layers after 100 train forwards (oracle: dense SVD)";
  return lo >= 0.999 && hi <= 1.001;
}

// ---- criterion 9: every conditional/translation variant does its job -----

struct VariantScore {
  std::string name;
  int passed = 0;
  std::ostringstream per_seed;
};

bool run_variant(VariantScore& score, const std::function<bool(std::uint64_t, std::string&)>& one) {
  for (std::uint64_t seed : kSeeds) {
    std::string note;
    bool ok = false;
    try {
      ok = one(seed, note);
    } catch (const std::exception& err) {
      note = std::string("error:") + err.what();
    }
    score.passed += ok;
    score.per_seed << " s" << seed << ":" << (ok ? "ok" : "miss") << "(" << note << ")";
  }
  return score.passed >= 3;
}

bool criterion9(std::string& detail) {
  const auto t0 = Clock::now();

  VariantScore cgan{"cgan"};
  const bool cgan_ok = run_variant(cgan, [](std::uint64_t seed, std::string& note) {
    const toydata::LabeledMixture lm = toydata::labeled_ring(4, 2.0, 0.25);
    trainers::TrainConfig cfg;
    cfg.algorithm = models::Algorithm::cgan;
    cfg.data = toydata::DistributionSpec(lm);
    cfg.steps = 1500;
    cfg.batch = 64;
    cfg.dims.z_dim = 8;
    cfg.dims.hidden = {64, 64};
    cfg.eval_every = 750;
    cfg.eval_samples = 1000;
    cfg.seed = seed;
    const trainers::TrainResult res = trainers::train(cfg);
    if (res.log.status != "completed") {
      note = "diverged";
      return false;
    }
    const int per_class = 250;
    std::vector<int> labels;
    for (int c = 0; c < 4; ++c) labels.insert(labels.end(), per_class, c);
    Rng rng(seed * 1000 + 11);
    const Tensor samples = trainers::generate_with_labels(res.bundle, labels, rng);
    const std::vector<int> got = toydata::labels_for(lm, samples);
    int hit = 0;
    for (int r = 0; r < samples.rows(); ++r)
      hit += (got[static_cast<std::size_t>(r)] == labels[static_cast<std::size_t>(r)]);
    const double acc = static_cast<double>(hit) / samples.rows();
    note = "acc=" + fmt(acc);
    return acc > 0.8;
  });

  VariantScore info{"infogan"};
  const bool info_ok = run_variant(info, [](std::uint64_t seed, std::string& note) {
    trainers::TrainConfig cfg;
    cfg.algorithm = models::Algorithm::infogan;
    cfg.data = toydata::DistributionSpec(toydata::MixtureRing{4, 2.0, 0.05});
    cfg.steps = 1500;
    cfg.batch = 64;
    cfg.dims.z_dim = 8;
    cfg.dims.hidden = {64, 64};
    cfg.dims.code_k = 4;
    cfg.eval_every = 750;
    cfg.eval_samples = 1000;
    cfg.seed = seed;
    const trainers::TrainResult res = trainers::train(cfg);
    if (res.log.status != "completed") {
      note = "diverged";
      return false;
    }
    std::vector<int> codes;
    for (int c = 0; c < 4; ++c) codes.insert(codes.end(), 250, c);
    Rng rng(seed * 1000 + 13);
    const Tensor samples = trainers::generate_with_codes(res.bundle, codes, rng);
    const Tensor logits = eval_forward(*res.bundle.q_network, samples);
    int hit = 0;
    for (int r = 0; r < logits.rows(); ++r) {
      int arg = 0;
      for (int c = 1; c < logits.cols(); ++c)
        if (logits.at(r, c) > logits.at(r, arg)) arg = c;
      hit += (arg == codes[static_cast<std::size_t>(r)]);
    }
    const double acc = static_cast<double>(hit) / logits.rows();
    note = "recovery=" + fmt(acc);
    return acc > 0.8;
  });

  VariantScore aae{"aae"};
  const bool aae_ok = run_variant(aae, [](std::uint64_t seed, std::string& note) {
    trainers::TrainConfig cfg;
    cfg.algorithm = models::Algorithm::aae;
    // A wide-mode 2-D mixture keeps prior matching well-posed: the encoder
    // image of simply-connected full-dimensional data can fill a Gaussian.
    cfg.data = toydata::DistributionSpec(toydata::MixtureGrid{2, 2.0, 0.5});
    cfg.steps = 3000;
    cfg.batch = 64;
    cfg.dims.z_dim = 8;
    cfg.dims.hidden = {64, 64};
    cfg.eval_every = 1500;
    cfg.eval_samples = 1000;
    cfg.seed = seed;
    const trainers::TrainResult res = trainers::train(cfg);
    if (res.log.status != "completed") {
      note = "diverged";
      return false;
    }
    Rng rng(seed * 1000 + 17);
    const Tensor held_out =
        toydata::sample(std::get<toydata::DistributionSpec>(cfg.data), 4000, rng);
    const Tensor codes = eval_forward(*res.bundle.encoder, held_out);
    const auto prior_probs =
        toydata::bin_probs(toydata::GaussMix1D{{0.0}, 1.0}, 32, -4.8, 4.8);
    const auto prior = metrics::histogram_from_probs(prior_probs, -4.8, 4.8);
    double worst = 0.0;
    for (int dim = 0; dim < codes.cols(); ++dim) {
      std::vector<double> col(static_cast<std::size_t>(codes.rows()));
      for (int r = 0; r < codes.rows(); ++r) col[static_cast<std::size_t>(r)] = codes.at(r, dim);
      worst = std::max(worst, metrics::js(metrics::histogram(col, 32, -4.8, 4.8), prior));
    }
    note = "worst_dim_js=" + fmt(worst);
    return worst < 0.1;
  });

  VariantScore cyc{"cyclegan"};
  const bool cyc_ok = run_variant(cyc, [](std::uint64_t seed, std::string& note) {
    trainers::TrainConfig cfg;
    cfg.algorithm = models::Algorithm::cyclegan_toy;
    cfg.data = trainers::TwoDomainData{};
    cfg.steps = 1500;
    cfg.batch = 64;
    cfg.dims.z_dim = 8;
    cfg.dims.hidden = {64, 64};
    cfg.eval_every = 750;
    cfg.eval_samples = 1000;
    cfg.seed = seed;
    const trainers::TrainResult res = trainers::train(cfg);
    if (res.log.status != "completed") {
      note = "diverged";
      return false;
    }
    Rng rng(seed * 1000 + 19);
    const toydata::TwoDomainSet held_out = toydata::sample_two_domain(512, rng);
    const Tensor ab = eval_forward(res.bundle.generator, held_out.a);
    const Tensor aba = eval_forward(*res.bundle.generator_b, ab);
    const Tensor ba = eval_forward(*res.bundle.generator_b, held_out.b);
    const Tensor bab = eval_forward(res.bundle.generator, ba);
    const double cycle =
        losses::cycle_loss(held_out.a, aba, held_out.b, bab).item();
    note = "cycle=" + fmt(cycle);
    return cycle < 0.2;
  });

  VariantScore pix{"pix2pix"};
  const bool pix_ok = run_variant(pix, [](std::uint64_t seed, std::string& note) {
    trainers::TrainConfig cfg;
    cfg.algorithm = models::Algorithm::pix2pix_toy;
    cfg.data = trainers::PairedData{};
    cfg.steps = 1200;
    cfg.batch = 64;
    cfg.dims.z_dim = 8;
    cfg.dims.hidden = {64, 64};
    cfg.eval_every = 600;
    cfg.eval_samples = 1000;
    cfg.seed = seed;
    Rng ho_rng(seed * 1000 + 23);
    const toydata::PairedSet held_out = toydata::sample_paired(512, ho_rng);
    double init_l1 = -1.0;
    trainers::TrainHooks hooks;
    hooks.on_critic_step = [&](int step, int it, const models::ModelBundle& bundle) {
      // The translator has not been updated yet at the first critic step.
      if (step == 1 && it == 0)
        init_l1 = mean_abs_gap(eval_forward(bundle.generator, held_out.x), held_out.y);
    };
    const trainers::TrainResult res = trainers::train(cfg, hooks);
    if (res.log.status != "completed") {
      note = "diverged";
      return false;
    }
    const double final_l1 =
        mean_abs_gap(eval_forward(res.bundle.generator, held_out.x), held_out.y);
    note = "l1 " + fmt(init_l1) + "->" + fmt(final_l1);
    return init_l1 > 0.0 && final_l1 <= init_l1 / 5.0;
  });

  const double secs = seconds_since(t0);
  std::ostringstream d;
  for (const VariantScore* v : {&cgan, &info, &aae, &cyc, &pix})
    d << " " << v->name << "=" << v->passed << "/5 [" << v->per_seed.str() << " ]";
  detail = fmt(secs) + "s;" + d.str();
  return cgan_ok && info_ok && aae_ok && cyc_ok && pix_ok && secs < 900.0;
}

// ---- criterion 10: the diffusion baseline fits and diversifies -----------

bool criterion10(std::string& detail) {
  const auto t0 = Clock::now();
  std::ostringstream d;

  // Gaussian fit over 1e4 samples.
  diffusion::DenoiserConfig gcfg;
  gcfg.dist = toydata::DistributionSpec(toydata::Gaussian1D{});
  gcfg.schedule = diffusion::linear_schedule(1000, 1e-4, 0.02);
  gcfg.steps = 4000;
  gcfg.batch = 128;
  gcfg.hidden = {64, 64};
  gcfg.seed = 1;
  const diffusion::DenoiserResult gres = diffusion::train_denoiser(gcfg);
  bool gauss_ok = gres.log.status == "completed";
  if (gauss_ok) {
    Rng srng = Rng(1).split(901);
    const Tensor samples = diffusion::reverse_sample(gres.denoiser, gcfg.schedule, 10000, srng);
    const auto [m, s] = column_mean_std(samples, 0);
    gauss_ok = std::fabs(m - 4.0) < 0.5 && std::fabs(s - 1.25) < 0.5;
    d << " gaussian(mean=" << fmt(m) << ",sd=" << fmt(s) << (gauss_ok ? ")" : ",miss)");
  } else {
    d << " gaussian(diverged)";
  }

  // Ring-8 coverage: all 8 modes in at least 4 of 5 seeds.
  const toydata::DistributionSpec ring{toydata::MixtureRing{}};
  const Tensor centers = toydata::mode_centers(ring);
  const double mode_sd = toydata::mode_stddev(ring);
  int covered_runs = 0;
  d << " ring:";
  for (std::uint64_t seed : kSeeds) {
    diffusion::DenoiserConfig rcfg;
    rcfg.dist = ring;
    rcfg.schedule = diffusion::linear_schedule(1000, 1e-4, 0.02);
    rcfg.steps = 4000;
    rcfg.batch = 128;
    rcfg.hidden = {64, 64};
    rcfg.seed = seed;
    const diffusion::DenoiserResult rres = diffusion::train_denoiser(rcfg);
    int modes = 0;
    if (rres.log.status == "completed") {
      Rng srng = Rng(seed).split(902);
      const Tensor samples = diffusion::reverse_sample(rres.denoiser, rcfg.schedule, 4000, srng);
      if (samples.all_finite()) modes = metrics::mode_stats(samples, centers, mode_sd).modes_covered;
    }
    covered_runs += (modes == 8);
    d << " s" << seed << "=" << modes;
  }
  const bool ring_ok = covered_runs >= 4;

  // The comparison command emits its two-method table.
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ganlab_acceptance_compare";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cmp_cfg =
      "[experiment]\nsteps = 200\nbatch = 32\neval_every = 100\neval_samples = 256\neval_bins = "
      "32\n[model]\nz_dim = 4\nhidden = [16]\n[data]\ndistribution = \"gaussian1d\"\n"
      "[diffusion]\nschedule = \"constant\"\ntimesteps = 40\nbeta = 0.05\nsteps = 200\nbatch = "
      "32\nhidden = [16]\n";
  report::write_text_file((dir / "cmp.toml").string(), cmp_cfg);
  bool table_ok = cli::cmd_compare((dir / "cmp.toml").string(), (dir / "out").string(),
                                   std::nullopt) == 0;
  if (table_ok) {
    const std::string csv = report::read_text_file((dir / "out" / "compare.csv").string());
    table_ok = csv.rfind("method,js,w1,modes_covered,wall_time_s,diverged\n", 0) == 0 &&
               csv.find("\nadversarial,") != std::string::npos &&
               csv.find("\ndiffusion,") != std::string::npos &&
               std::count(csv.begin(), csv.end(), '\n') == 3;  // header + two data rows
  }
  d << " compare_table=" << (table_ok ? "ok" : "missing");

  const double secs = seconds_since(t0);
  detail = fmt(secs) + "s;" + d.str() + " ring_runs_with_8=" + std::to_string(covered_runs) + "/5";
  return gauss_ok && ring_ok && table_ok;
}

// ---- criterion 11: metric identities vs direct oracles -------------------

double assignment_oracle(std::vector<double> xs, std::vector<double> ys) {
  // Exhaustive min-cost matching (n <= 8).
  std::vector<int> perm(ys.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      cost += std::fabs(xs[i] - ys[static_cast<std::size_t>(perm[i])]);
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(xs.size());
}

bool criterion11(std::string& detail) {
  Rng rng(2024);
  bool ok = true;
  std::string why;

  // Symmetry and the ln 2 bound on random histogram pairs.
  double max_js = 0.0, max_asym = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(500), b(500);
    for (double& x : a) x = rng.normal();
    for (double& x : b) x = 2.0 * rng.normal() + rng.uniform01();
    const auto pa = metrics::histogram(a, 32, -6, 6);
    const auto pb = metrics::histogram(b, 32, -6, 6);
    const double j1 = metrics::js(pa, pb), j2 = metrics::js(pb, pa);
    max_asym = std::max(max_asym, std::fabs(j1 - j2));
    max_js = std::max(max_js, j1);
    if (j1 < 0.0) ok = false;
  }
  if (max_asym > 1e-12) {
    ok = false;
    why += " asym=" + fmt(max_asym);
  }
  if (max_js > std::log(2.0) + 1e-12) {
    ok = false;
    why += " js>ln2";
  }
  // Disjoint point masses reach the bound.
  const auto p1 = metrics::histogram({0.1}, 2, 0.0, 1.0);
  const auto p2 = metrics::histogram({0.9}, 2, 0.0, 1.0);
  if (std::fabs(metrics::js(p1, p2) - std::log(2.0)) > 1e-9) {
    ok = false;
    why += " disjoint!=ln2";
  }

  // KL against the direct-summation value.
  const auto hp = metrics::histogram_from_probs({0.5, 0.5}, 0.0, 1.0);
  const auto hq = metrics::histogram_from_probs({0.25, 0.75}, 0.0, 1.0);
  const double kl_exact = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  const double kl_got = metrics::kl(hp, hq);
  if (std::fabs(kl_got - kl_exact) > 1e-9) {
    ok = false;
    why += " kl=" + fmt(kl_got);
  }

  // Transport distance equals the exhaustive assignment for every n <= 8.
  double w1_worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
      for (double& x : xs) x = 3.0 * rng.normal();
      for (double& y : ys) y = 3.0 * rng.normal() + 1.0;
      const double got = metrics::w1_exact(xs, ys);
      const double want = assignment_oracle(xs, ys);
      w1_worst = std::max(w1_worst, std::fabs(got - want));
    }
  }
  if (w1_worst > 1e-12) {
    ok = false;
    why += " w1_gap=" + fmt(w1_worst);
  }

  detail = "js sym/bound over 200 pairs, kl=" + fmt(kl_got) + " (oracle " + fmt(kl_exact) +
           "), w1 vs exhaustive assignment n<=8 gap=" + fmt(w1_worst) +
           (why.empty() ? "" : ";" + why);
  return ok;
}

// ---- criterion 12: training is bytewise reproducible ---------------------

bool criterion12(std::string& detail) {
  auto run_csv = [](const trainers::TrainConfig& cfg) {
    return report::metrics_csv(trainers::train(cfg).log.records);
  };
  std::vector<std::pair<std::string, trainers::TrainConfig>> cases;

  trainers::TrainConfig a;
  a.data = toydata::DistributionSpec(toydata::Gaussian1D{});
  a.steps = 60;
  a.batch = 32;
  a.dims.z_dim = 4;
  a.dims.hidden = {16};
  a.eval_every = 30;
  a.eval_samples = 256;
  a.seed = 11;
  cases.emplace_back("vanilla-gaussian", a);

  trainers::TrainConfig b;
  b.algorithm = models::Algorithm::wgan_gp;
  b.data = toydata::DistributionSpec(toydata::MixtureRing{});
  b.steps = 20;
  b.batch = 32;
  b.dims.z_dim = 4;
  b.dims.hidden = {16};
  b.eval_every = 10;
  b.eval_samples = 256;
  b.reg.input_noise_std = 0.05;
  b.seed = 12;
  cases.emplace_back("wgan_gp-ring", b);

  trainers::TrainConfig c;
  c.algorithm = models::Algorithm::cgan;
  c.data = toydata::DistributionSpec(toydata::labeled_ring(4, 2.0, 0.25));
  c.steps = 30;
  c.batch = 32;
  c.dims.z_dim = 4;
  c.dims.hidden = {16};
  c.eval_every = 15;
  c.eval_samples = 256;
  c.seed = 13;
  cases.emplace_back("cgan-labeled", c);

  bool ok = true;
  std::ostringstream d;
  for (const auto& [name, cfg] : cases) {
    const bool same = run_csv(cfg) == run_csv(cfg);
    ok = ok && same;
    d << " " << name << "=" << (same ? "identical" : "DIFFERS");
  }
  detail = "metrics csv bytes across repeated runs:" + d.str();
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};

  using Criterion = bool (*)(std::string&);
  const std::pair<int, Criterion> table[] = {
      {1, criterion1}, {2, criterion2},  {3, criterion3},  {4, criterion4},
      {5, criterion5}, {6, criterion6},  {7, criterion7},  {8, criterion8},
      {9, criterion9}, {10, criterion10}, {11, criterion11}, {12, criterion12},
  };

  int failed = 0, ran = 0;
  const auto t0 = Clock::now();
  for (int id : selected) {
    for (const auto& [num, fn] : table) {
      if (num != id) continue;
      ++ran;
      std::string detail;
      bool pass = false;
      try {
        pass = fn(detail);
      } catch (const std::exception& err) {
        detail = std::string("exception: ") + err.what();
      }
      failed += !pass;
      std::printf("[%2d] %s — %s\n", num, pass ? "PASS" : "FAIL", detail.c_str());
      std::fflush(stdout);
    }
  }
  std::printf("acceptance: %d/%d criteria passed (%.1fs total)\n", ran - failed, ran,
              seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
