#include "ganlab/trainers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "ganlab/autodiff.hpp"

namespace ganlab::trainers {
namespace {

using models::Algorithm;

// Internal control-flow signal: a loss went non-finite or past the runaway
// bound, so the run ends with status "diverged".
struct Diverged {};

constexpr double kRunawayLoss = 1e6;

bool unconditional_family(Algorithm a) {
  return a == Algorithm::vanilla || a == Algorithm::wgan_clip || a == Algorithm::wgan_gp ||
         a == Algorithm::lsgan || a == Algorithm::hinge;
}

bool prob_head(Algorithm a) {
  return a == Algorithm::vanilla || a == Algorithm::cgan || a == Algorithm::infogan ||
         a == Algorithm::aae;
}

double checked(const Tensor& loss) {
  const double v = loss.item();
  if (!std::isfinite(v) || std::abs(v) > kRunawayLoss) throw Diverged{};
  return v;
}

Tensor normal_tensor(int rows, int cols, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (double& e : v) e = rng.normal();
  return Tensor(rows, cols, std::move(v));
}

std::vector<int> uniform_labels(int n, int k, Rng& rng) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int& e : out) e = rng.uniform_int(k);
  return out;
}

Tensor one_hot(const std::vector<int>& idx, int k) {
  const int n = static_cast<int>(idx.size());
  std::vector<double> v(static_cast<std::size_t>(n) * static_cast<std::size_t>(k), 0.0);
  for (int r = 0; r < n; ++r) {
    v[static_cast<std::size_t>(r) * k + idx[static_cast<std::size_t>(r)]] = 1.0;
  }
  return Tensor(n, k, std::move(v));
}

std::vector<double> column(const Tensor& t, int j) {
  std::vector<double> out(static_cast<std::size_t>(t.rows()));
  for (int r = 0; r < t.rows(); ++r) out[static_cast<std::size_t>(r)] = t.at(r, j);
  return out;
}

double sigmoid_value(double s) { return 1.0 / (1.0 + std::exp(-s)); }

// Discriminator outputs as probabilities: sigmoid-head outputs pass through,
// raw scores are squashed so the 0.5 threshold sits at score 0.
std::vector<double> as_probs(const Tensor& out, bool already_prob) {
  std::vector<double> p(static_cast<std::size_t>(out.rows()));
  for (int r = 0; r < out.rows(); ++r) {
    p[static_cast<std::size_t>(r)] = already_prob ? out.at(r, 0) : sigmoid_value(out.at(r, 0));
  }
  return p;
}

// One optimizer bound to a set of live tensors (network parameters and, for
// the conditional roster, embedding tables).
struct Player {
  std::vector<Tensor*> slots;
  nn::OptimizerState opt;
};

std::vector<Tensor*> param_ptrs(nn::ParameterSet& ps) {
  std::vector<Tensor*> out;
  out.reserve(ps.params.size());
  for (Tensor& t : ps.params) out.push_back(&t);
  return out;
}

Player make_player(const nn::OptimizerConfig& cfg, std::vector<Tensor*> slots) {
  Player p;
  p.slots = std::move(slots);
  nn::ParameterSet view;
  view.params.reserve(p.slots.size());
  for (Tensor* t : p.slots) view.params.push_back(*t);
  p.opt = nn::make_optimizer(cfg, view);
  return p;
}

void step_player(Player& p, const std::vector<Tensor>& grads) {
  nn::ParameterSet view;
  view.params.reserve(p.slots.size());
  for (Tensor* t : p.slots) view.params.push_back(*t);
  nn::optimizer_step(p.opt, view, grads);
  for (std::size_t i = 0; i < p.slots.size(); ++i) *p.slots[i] = view.params[i];
}

// Per-row mean squared reconstruction error, the autoencoder energy: [n x 1].
Tensor row_energy(const Tensor& x, const Tensor& recon) {
  const int d = x.cols();
  return matmul(square(sub(recon, x)), Tensor::filled(d, 1, 1.0 / d));
}

Tensor forward_values(const models::Network& net, const Tensor& x) {
  nn::ParameterSet view = net.params;  // shallow handle copy; eval never mutates
  return nn::forward(net.spec, view, x, nn::Mode::eval).output;
}

}  // namespace

int data_dim(const DataSpec& data) {
  if (std::holds_alternative<toydata::DistributionSpec>(data)) {
    return toydata::dim(std::get<toydata::DistributionSpec>(data));
  }
  return 2;  // the paired and two-domain fixtures are both planar
}

int resolved_n_critic(const TrainConfig& cfg) {
  if (cfg.n_critic > 0) return cfg.n_critic;
  return models::is_wgan_family(cfg.algorithm) ? 5 : 1;
}

TrainConfig resolve_config(const TrainConfig& cfg) {
  TrainConfig r = cfg;
  if (r.steps < 1) throw std::invalid_argument("train: steps must be positive");
  if (r.batch < 1) throw std::invalid_argument("train: batch must be positive");
  if (r.n_critic < 0) throw std::invalid_argument("train: n_critic must be nonnegative");
  if (r.unroll_k < 0) throw std::invalid_argument("train: unroll_k must be nonnegative");
  if (r.eval_every < 1) throw std::invalid_argument("train: eval_every must be positive");
  if (r.eval_samples < 2) throw std::invalid_argument("train: eval_samples must be at least 2");
  if (r.eval_bins < 2) throw std::invalid_argument("train: eval_bins must be at least 2");

  const Regularizers& reg = r.reg;
  if (reg.input_noise_std < 0) throw std::invalid_argument("train: input_noise_std must be >= 0");
  if (reg.dp_noise_std < 0) throw std::invalid_argument("train: dp_noise_std must be >= 0");
  if (reg.replay_capacity < 0) throw std::invalid_argument("train: replay_capacity must be >= 0");
  if (reg.replay_mix_fraction < 0 || reg.replay_mix_fraction > 1) {
    throw std::invalid_argument("train: replay_mix_fraction must lie in [0, 1]");
  }
  if (reg.feature_matching_weight < 0) {
    throw std::invalid_argument("train: feature_matching_weight must be >= 0");
  }
  if (reg.gp_lambda < 0) throw std::invalid_argument("train: gp_lambda must be >= 0");
  if (reg.clip_c <= 0) throw std::invalid_argument("train: clip_c must be positive");
  if (reg.l1_lambda < 0) throw std::invalid_argument("train: l1_lambda must be >= 0");
  if (reg.cycle_lambda < 0) throw std::invalid_argument("train: cycle_lambda must be >= 0");
  if (reg.grad_clip_mode != nn::ClipMode::none && reg.grad_clip_bound <= 0) {
    throw std::invalid_argument("train: grad clipping needs a positive bound");
  }
  if (!(reg.smoothing.fake_target >= 0 && reg.smoothing.fake_target < reg.smoothing.real_target &&
        reg.smoothing.real_target <= 1)) {
    throw std::invalid_argument("train: smoothing targets need 0 <= fake < real <= 1");
  }

  const int dd = data_dim(r.data);
  if (r.dims.data_dim == 0) r.dims.data_dim = dd;
  if (r.dims.data_dim != dd) {
    throw std::invalid_argument("train: dims.data_dim does not match the dataset");
  }
  r.dims.spectral_norm = r.dims.spectral_norm || reg.spectral_norm;

  const bool uncond = unconditional_family(r.algorithm);
  switch (r.algorithm) {
    case Algorithm::cgan: {
      const auto* dist = std::get_if<toydata::DistributionSpec>(&r.data);
      const auto* lab = dist ? std::get_if<toydata::LabeledMixture>(dist) : nullptr;
      if (lab == nullptr) {
        throw std::invalid_argument("train: the conditional algorithm needs a labeled mixture");
      }
      const int classes = static_cast<int>(lab->centers.size());
      if (r.dims.num_classes == 0) r.dims.num_classes = classes;
      if (r.dims.num_classes != classes) {
        throw std::invalid_argument("train: dims.num_classes does not match the labeled mixture");
      }
      break;
    }
    case Algorithm::infogan:
      if (!std::holds_alternative<toydata::DistributionSpec>(r.data)) {
        throw std::invalid_argument("train: this algorithm needs a distribution dataset");
      }
      if (r.dims.code_k < 2) {
        throw std::invalid_argument("train: the code-recovery algorithm needs code_k >= 2");
      }
      break;
    case Algorithm::pix2pix_toy:
      if (!std::holds_alternative<PairedData>(r.data)) {
        throw std::invalid_argument("train: the paired-translation algorithm needs paired data");
      }
      break;
    case Algorithm::cyclegan_toy:
      if (!std::holds_alternative<TwoDomainData>(r.data)) {
        throw std::invalid_argument("train: the cycle algorithm needs two-domain data");
      }
      break;
    default:
      if (!std::holds_alternative<toydata::DistributionSpec>(r.data)) {
        throw std::invalid_argument("train: this algorithm needs a distribution dataset");
      }
      break;
  }

  if (!uncond) {
    if (r.dims.pack_k != 1) {
      throw std::invalid_argument("train: packing applies only to the unconditional loops");
    }
    if (r.unroll_k != 0) {
      throw std::invalid_argument("train: unrolling applies only to the unconditional loops");
    }
    if (reg.replay_capacity != 0 || reg.input_noise_std != 0 || reg.dp_noise_std != 0 ||
        reg.feature_matching_weight != 0) {
      throw std::invalid_argument(
          "train: replay / input noise / gradient noise / feature matching apply only to the "
          "unconditional loops");
    }
  }
  if (r.batch % r.dims.pack_k != 0) {
    throw std::invalid_argument("train: batch must be divisible by pack_k");
  }

  r.n_critic = resolved_n_critic(r);
  return r;
}

// ---- replay buffer ----------------------------------------------------------

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 0) throw std::invalid_argument("ReplayBuffer: capacity must be >= 0");
  rows_.reserve(static_cast<std::size_t>(capacity));
}

void ReplayBuffer::insert(const Tensor& rows, Rng& rng) {
  if (capacity_ == 0) return;
  const int d = rows.cols();
  if (dim_ < 0) dim_ = d;
  if (d != dim_) throw std::invalid_argument("ReplayBuffer: row width changed");
  for (int r = 0; r < rows.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) row[static_cast<std::size_t>(c)] = rows.at(r, c);
    ++count_;
    if (static_cast<int>(rows_.size()) < capacity_) {
      rows_.push_back(std::move(row));
    } else {
      // Reservoir step: the new row replaces a stored one with probability
      // capacity / count, keeping retention uniform over history.
      const int j = rng.uniform_int(static_cast<int>(count_));
      if (j < capacity_) rows_[static_cast<std::size_t>(j)] = std::move(row);
    }
  }
}

std::vector<double> ReplayBuffer::draw(Rng& rng) const {
  if (rows_.empty()) throw std::logic_error("ReplayBuffer: draw from an empty buffer");
  return rows_[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(rows_.size())))];
}

Tensor replay_mix(ReplayBuffer& buffer, const Tensor& fresh, double mix_fraction, Rng& rng) {
  if (mix_fraction < 0 || mix_fraction > 1) {
    throw std::invalid_argument("replay_mix: mix_fraction must lie in [0, 1]");
  }
  const int n = fresh.rows();
  const int d = fresh.cols();
  Tensor out = fresh;
  const int m = std::min(n, static_cast<int>(std::floor(mix_fraction * n)));
  if (buffer.size() > 0 && m > 0) {
    std::vector<double> v = fresh.values();
    for (int r = n - m; r < n; ++r) {
      const std::vector<double> row = buffer.draw(rng);
      std::copy(row.begin(), row.end(), v.begin() + static_cast<std::ptrdiff_t>(r) * d);
    }
    out = Tensor(n, d, std::move(v));
  }
  buffer.insert(fresh, rng);
  return out;
}

Tensor add_input_noise(const Tensor& x, double stddev, Rng& rng) {
  if (stddev < 0) throw std::invalid_argument("add_input_noise: stddev must be >= 0");
  if (stddev == 0.0) return x;
  std::vector<double> v(x.size());
  for (double& e : v) e = stddev * rng.normal();
  return add(x, Tensor(x.rows(), x.cols(), std::move(v)));
}

std::vector<Tensor> dp_noise(std::vector<Tensor> grads, double sigma, Rng& rng) {
  if (sigma < 0) throw std::invalid_argument("dp_noise: sigma must be >= 0");
  if (sigma == 0.0) return grads;
  for (Tensor& g : grads) {
    std::vector<double> v = g.values();
    for (double& e : v) e += sigma * rng.normal();
    g = Tensor(g.rows(), g.cols(), std::move(v));
  }
  return grads;
}

// ---- sampling helpers shared by training and reporting -----------------------

Tensor generate_with_labels(const models::ModelBundle& bundle, const std::vector<int>& labels,
                            Rng& rng) {
  if (!bundle.g_embedding.has_value()) {
    throw std::invalid_argument("generate_with_labels: bundle has no label embedding");
  }
  const int n = static_cast<int>(labels.size());
  const Tensor z = normal_tensor(n, bundle.dims.z_dim, rng);
  const Tensor in = models::condition(z, nn::embed(*bundle.g_embedding, labels));
  return forward_values(bundle.generator, in);
}

Tensor generate_with_codes(const models::ModelBundle& bundle, const std::vector<int>& codes,
                           Rng& rng) {
  if (bundle.dims.code_k < 2) {
    throw std::invalid_argument("generate_with_codes: bundle has no categorical code");
  }
  const int n = static_cast<int>(codes.size());
  const Tensor z = normal_tensor(n, bundle.dims.z_dim, rng);
  const Tensor in = models::condition(z, one_hot(codes, bundle.dims.code_k));
  return forward_values(bundle.generator, in);
}

Tensor generate_samples(const models::ModelBundle& bundle, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("generate_samples: n must be positive");
  switch (bundle.algorithm) {
    case Algorithm::cgan:
      return generate_with_labels(bundle, uniform_labels(n, bundle.dims.num_classes, rng), rng);
    case Algorithm::infogan:
      return generate_with_codes(bundle, uniform_labels(n, bundle.dims.code_k, rng), rng);
    case Algorithm::aae: {
      // The decoder half of the autoencoder, driven by the latent prior.
      const int latent = models::autoencoder_latent_dim(bundle.dims);
      return forward_values(bundle.generator, normal_tensor(n, latent, rng));
    }
    case Algorithm::pix2pix_toy:
      // Inputs follow the paired fixture's x marginal (standard normal).
      return forward_values(bundle.generator, normal_tensor(n, bundle.dims.data_dim, rng));
    case Algorithm::cyclegan_toy:
      return forward_values(bundle.generator, toydata::sample(toydata::two_domain_a(), n, rng));
    default:
      return forward_values(bundle.generator, normal_tensor(n, bundle.dims.z_dim, rng));
  }
}

// ---- the training loop --------------------------------------------------------

namespace {

class Trainer {
 public:
  Trainer(TrainConfig cfg, TrainHooks hooks)
      : cfg_(std::move(cfg)),
        hooks_(std::move(hooks)),
        root_(cfg_.seed),
        bundle_(models::build_bundle(cfg_.algorithm, cfg_.dims, root_.split(1).next_u64())),
        data_rng_(root_.split(2)),
        z_rng_(root_.split(3)),
        label_rng_(root_.split(4)),
        noise_rng_(root_.split(5)),
        dp_rng_(root_.split(6)),
        gp_rng_(root_.split(7)),
        replay_rng_(root_.split(8)),
        unroll_data_rng_(root_.split(9)),
        unroll_z_rng_(root_.split(10)),
        replay_(cfg_.reg.replay_capacity) {
    wire_players();
    wire_eval_targets();
  }

  TrainResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    log_.config = cfg_;
    try {
      evaluate_now(0);
      for (int s = 1; s <= cfg_.steps; ++s) {
        step_once(s);
        log_.steps_completed = s;
        if (s % cfg_.eval_every == 0 || s == cfg_.steps) evaluate_now(s);
      }
    } catch (const Diverged&) {
      log_.status = "diverged";
    } catch (const NumericDomainError&) {
      log_.status = "diverged";
    }
    log_.final_samples = last_eval_samples_;
    log_.g_updates = g_updates_;
    log_.d_updates = d_updates_;
    log_.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return TrainResult{std::move(log_), std::move(bundle_)};
  }

 private:
  // ---- wiring ----
  void wire_players() {
    const auto alg = cfg_.algorithm;
    std::vector<Tensor*> d_slots = param_ptrs(bundle_.discriminator.params);
    std::vector<Tensor*> g_slots = param_ptrs(bundle_.generator.params);
    if (alg == Algorithm::cgan) {
      d_slots.push_back(&*bundle_.d_embedding);
      g_slots.push_back(&*bundle_.g_embedding);
    }
    if (alg == Algorithm::cyclegan_toy) {
      for (Tensor* t : param_ptrs(bundle_.discriminator_b->params)) d_slots.push_back(t);
      for (Tensor* t : param_ptrs(bundle_.generator_b->params)) g_slots.push_back(t);
    }
    d_player_ = make_player(cfg_.d_opt, std::move(d_slots));
    g_player_ = make_player(cfg_.g_opt, std::move(g_slots));
    if (alg == Algorithm::infogan) {
      q_player_ = make_player(cfg_.g_opt, param_ptrs(bundle_.q_network->params));
    }
    if (alg == Algorithm::aae) {
      enc_player_ = make_player(cfg_.g_opt, param_ptrs(bundle_.encoder->params));
    }
  }

  void wire_eval_targets() {
    const int d = cfg_.dims.data_dim;
    if (std::holds_alternative<PairedData>(cfg_.data)) {
      // y = Rot(pi/4) x + 0.05 eps with x ~ N(0, I), so each output axis is
      // N(0, 1.0025) exactly (the rotation is orthogonal).
      const double s = std::sqrt(1.0 + 0.05 * 0.05);
      marginals_.assign(static_cast<std::size_t>(d), toydata::GaussMix1D{{0.0}, s});
      centers_ = Tensor(1, d);
      mode_sd_ = s;
      lo_ = -4.8 * s;
      hi_ = 4.8 * s;
      return;
    }
    const toydata::DistributionSpec dist = std::holds_alternative<TwoDomainData>(cfg_.data)
                                               ? toydata::two_domain_b()
                                               : std::get<toydata::DistributionSpec>(cfg_.data);
    centers_ = toydata::mode_centers(dist);
    mode_sd_ = toydata::mode_stddev(dist);
    const auto range = toydata::default_hist_range(dist);
    lo_ = range.first;
    hi_ = range.second;
    marginals_.reserve(static_cast<std::size_t>(d));
    for (int axis = 0; axis < d; ++axis) marginals_.push_back(toydata::axis_marginal(dist, axis));
  }

  const toydata::DistributionSpec& dist() const {
    return std::get<toydata::DistributionSpec>(cfg_.data);
  }

  // ---- unconditional-family updates ----

  // One critic update against the live generator. Shared by the real loop
  // and the lookahead copies; only live updates insert into the replay
  // buffer (a hypothetical lookahead step must not pollute shared state).
  double critic_update(models::Network& dnet, Player& player, Rng& drng, Rng& zrng,
                       bool lookahead) {
    const Regularizers& reg = cfg_.reg;
    const int k = cfg_.dims.pack_k;
    Tensor real = toydata::sample(dist(), cfg_.batch, drng);
    Tensor fake =
        forward_values(bundle_.generator, normal_tensor(cfg_.batch, cfg_.dims.z_dim, zrng));
    if (!lookahead && reg.replay_capacity > 0) {
      fake = replay_mix(replay_, fake, reg.replay_mix_fraction, replay_rng_);
    }
    real = add_input_noise(real, reg.input_noise_std, noise_rng_);
    fake = add_input_noise(fake, reg.input_noise_std, noise_rng_);
    const Tensor real_p = models::pack(real, k);
    const Tensor fake_p = models::pack(fake, k);

    auto g = Graph::create();
    nn::ParameterSet dp = nn::attach(g, dnet.params);
    const Tensor o_real = nn::forward(dnet.spec, dp, real_p, nn::Mode::train).output;
    const Tensor o_fake = nn::forward(dnet.spec, dp, fake_p, nn::Mode::train).output;
    Tensor loss;
    switch (cfg_.algorithm) {
      case Algorithm::vanilla:
        loss = losses::d_loss_minimax(o_real, o_fake, reg.smoothing);
        break;
      case Algorithm::wgan_clip:
        loss = losses::wgan_losses(o_real, o_fake).d_loss;
        break;
      case Algorithm::wgan_gp: {
        const auto critic = [&](const Tensor& x) {
          return nn::forward(dnet.spec, dp, x, nn::Mode::eval).output;
        };
        loss = add(losses::wgan_losses(o_real, o_fake).d_loss,
                   losses::gradient_penalty(g, critic, real_p, fake_p, reg.gp_lambda, gp_rng_));
        break;
      }
      case Algorithm::lsgan:
        loss = losses::lsgan_losses(o_real, o_fake).d_loss;
        break;
      default:
        loss = losses::hinge_losses(o_real, o_fake).d_loss;
        break;
    }
    const double v = checked(loss);
    std::vector<Tensor> grads = grad(loss, dp.params);
    grads = dp_noise(std::move(grads), reg.dp_noise_std, dp_rng_);
    nn::clip_gradient(grads, reg.grad_clip_mode, reg.grad_clip_bound);
    step_player(player, grads);
    if (cfg_.algorithm == Algorithm::wgan_clip) nn::clip_weight_values(dnet.params, reg.clip_c);
    dnet.params.sn_u = dp.sn_u;
    return v;
  }

  double g_step_uncond() {
    const Regularizers& reg = cfg_.reg;
    const int k = cfg_.dims.pack_k;
    const nn::NetworkSpec& dspec = bundle_.discriminator.spec;

    auto g = Graph::create();
    nn::ParameterSet gp = nn::attach(g, bundle_.generator.params);

    // Unrolling: simulate unroll_k critic responses to the live generator
    // inside the graph, then score the generator against the responded
    // critic. Gradient flows through the simulated updates, so the
    // generator anticipates the counter-move a reacting critic would make —
    // the k = 0 fixed points are unchanged, but concentrating all mass in
    // one place now costs the generator what the critic's reaction would
    // charge for it. The simulation starts from the live weights and
    // moments and replays the critic's own optimizer rule in-graph (weight
    // clipping and replay mixing are not simulated); it is discarded after
    // this step and never touches the live critic.
    nn::ParameterSet dsim = bundle_.discriminator.params;  // detached view
    if (cfg_.unroll_k > 0) {
      dsim = nn::attach(g, bundle_.discriminator.params);
      const nn::OptimizerConfig& oc = d_player_.opt.cfg;
      // Live moments enter as constants and evolve in-graph.
      std::vector<Tensor> sim_m, sim_v;
      if (oc.kind != nn::OptimizerKind::sgd) {
        for (std::size_t j = 0; j < dsim.params.size(); ++j) {
          const Tensor& p = dsim.params[j];
          sim_m.emplace_back(p.rows(), p.cols(), d_player_.opt.m[j]);
          if (oc.kind == nn::OptimizerKind::adam)
            sim_v.emplace_back(p.rows(), p.cols(), d_player_.opt.v[j]);
        }
      }
      for (int i = 0; i < cfg_.unroll_k; ++i) {
        Tensor real = toydata::sample(dist(), cfg_.batch, unroll_data_rng_);
        real = add_input_noise(real, reg.input_noise_std, noise_rng_);
        Tensor fake_i =
            nn::forward(bundle_.generator.spec, gp,
                        normal_tensor(cfg_.batch, cfg_.dims.z_dim, unroll_z_rng_),
                        nn::Mode::train)
                .output;
        fake_i = add_input_noise(fake_i, reg.input_noise_std, noise_rng_);
        const Tensor real_i = models::pack(real, k);
        const Tensor fake_ip = models::pack(fake_i, k);
        const Tensor o_real = nn::forward(dspec, dsim, real_i, nn::Mode::train).output;
        const Tensor o_fake = nn::forward(dspec, dsim, fake_ip, nn::Mode::train).output;
        Tensor dl;
        switch (cfg_.algorithm) {
          case Algorithm::vanilla:
            dl = losses::d_loss_minimax(o_real, o_fake, reg.smoothing);
            break;
          case Algorithm::wgan_clip:
            dl = losses::wgan_losses(o_real, o_fake).d_loss;
            break;
          case Algorithm::wgan_gp: {
            const auto critic = [&](const Tensor& x) {
              return nn::forward(dspec, dsim, x, nn::Mode::eval).output;
            };
            dl = add(losses::wgan_losses(o_real, o_fake).d_loss,
                     losses::gradient_penalty(g, critic, real_i, fake_ip, reg.gp_lambda,
                                              gp_rng_));
            break;
          }
          case Algorithm::lsgan:
            dl = losses::lsgan_losses(o_real, o_fake).d_loss;
            break;
          default:
            dl = losses::hinge_losses(o_real, o_fake).d_loss;
            break;
        }
        const std::vector<Tensor> gw = grad(dl, dsim.params, /*create_graph=*/true);
        const double t = static_cast<double>(d_player_.opt.step_count + i + 1);
        for (std::size_t j = 0; j < dsim.params.size(); ++j) {
          switch (oc.kind) {
            case nn::OptimizerKind::sgd:
              dsim.params[j] = sub(dsim.params[j], scale(gw[j], oc.lr));
              break;
            case nn::OptimizerKind::adam: {
              sim_m[j] = add(scale(sim_m[j], oc.beta1), scale(gw[j], 1.0 - oc.beta1));
              sim_v[j] = add(scale(sim_v[j], oc.beta2), scale(square(gw[j]), 1.0 - oc.beta2));
              const double bc1 = 1.0 - std::pow(oc.beta1, t);
              const double bc2 = 1.0 - std::pow(oc.beta2, t);
              const Tensor denom = add(sqrt(scale(sim_v[j], 1.0 / bc2)),
                                       Tensor::filled(gw[j].rows(), gw[j].cols(), oc.eps));
              // 1/denom written as exp(-log(denom)); denom is positive.
              const Tensor step = mul(scale(sim_m[j], 1.0 / bc1), exp(neg(log(denom))));
              dsim.params[j] = sub(dsim.params[j], scale(step, oc.lr));
              break;
            }
            case nn::OptimizerKind::rmsprop: {
              sim_m[j] = add(scale(sim_m[j], oc.alpha), scale(square(gw[j]), 1.0 - oc.alpha));
              const Tensor denom =
                  add(sqrt(sim_m[j]), Tensor::filled(gw[j].rows(), gw[j].cols(), oc.eps));
              dsim.params[j] =
                  sub(dsim.params[j], scale(mul(gw[j], exp(neg(log(denom)))), oc.lr));
              break;
            }
          }
        }
      }
    }

    Tensor fake =
        nn::forward(bundle_.generator.spec, gp,
                    normal_tensor(cfg_.batch, cfg_.dims.z_dim, z_rng_), nn::Mode::train)
            .output;
    fake = add_input_noise(fake, reg.input_noise_std, noise_rng_);
    const Tensor fake_p = models::pack(fake, k);
    const nn::ForwardResult fr = nn::forward(dspec, dsim, fake_p, nn::Mode::eval);
    Tensor loss;
    switch (cfg_.algorithm) {
      case Algorithm::vanilla:
        loss = losses::g_loss(cfg_.g_objective, fr.output);
        break;
      case Algorithm::wgan_clip:
      case Algorithm::wgan_gp:
        loss = losses::wgan_losses(fr.output, fr.output).g_loss;
        break;
      case Algorithm::lsgan:
        loss = losses::lsgan_losses(fr.output, fr.output).g_loss;
        break;
      default:
        loss = losses::hinge_losses(fr.output, fr.output).g_loss;
        break;
    }
    if (reg.feature_matching_weight > 0) {
      Tensor real = toydata::sample(dist(), cfg_.batch, data_rng_);
      real = add_input_noise(real, reg.input_noise_std, noise_rng_);
      nn::ParameterSet dview2 = dsim;
      const Tensor f_real =
          *nn::forward(dspec, dview2, models::pack(real, k), nn::Mode::eval).tapped;
      loss = add(loss,
                 scale(losses::feature_matching_loss(f_real, *fr.tapped),
                       reg.feature_matching_weight));
    }
    const double v = checked(loss);
    std::vector<Tensor> grads = grad(loss, gp.params);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(g_player_, grads);
    return v;
  }

  // ---- conditional (label-embedding) updates ----

  double d_step_cgan() {
    const auto& lab = std::get<toydata::LabeledMixture>(dist());
    const auto real = toydata::sample_labeled(lab, cfg_.batch, data_rng_);
    const std::vector<int> y_fake =
        uniform_labels(cfg_.batch, cfg_.dims.num_classes, label_rng_);
    const Tensor z = normal_tensor(cfg_.batch, cfg_.dims.z_dim, z_rng_);
    const Tensor fake = forward_values(
        bundle_.generator, models::condition(z, nn::embed(*bundle_.g_embedding, y_fake)));

    auto g = Graph::create();
    nn::ParameterSet dp = nn::attach(g, bundle_.discriminator.params);
    const Tensor demb = g->leaf(*bundle_.d_embedding);
    const Tensor p_real =
        nn::forward(bundle_.discriminator.spec, dp,
                    models::condition(real.first, nn::embed(demb, real.second)), nn::Mode::train)
            .output;
    const Tensor p_fake =
        nn::forward(bundle_.discriminator.spec, dp,
                    models::condition(fake, nn::embed(demb, y_fake)), nn::Mode::train)
            .output;
    const Tensor loss = losses::d_loss_minimax(p_real, p_fake, cfg_.reg.smoothing);
    const double v = checked(loss);
    std::vector<Tensor> wrt = dp.params;
    wrt.push_back(demb);
    std::vector<Tensor> grads = grad(loss, wrt);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(d_player_, grads);
    bundle_.discriminator.params.sn_u = dp.sn_u;
    return v;
  }

  double g_step_cgan() {
    const std::vector<int> labels =
        uniform_labels(cfg_.batch, cfg_.dims.num_classes, label_rng_);
    const Tensor z = normal_tensor(cfg_.batch, cfg_.dims.z_dim, z_rng_);
    auto g = Graph::create();
    nn::ParameterSet gp = nn::attach(g, bundle_.generator.params);
    const Tensor gemb = g->leaf(*bundle_.g_embedding);
    const Tensor fake =
        nn::forward(bundle_.generator.spec, gp,
                    models::condition(z, nn::embed(gemb, labels)), nn::Mode::train)
            .output;
    nn::ParameterSet dview = bundle_.discriminator.params;
    const Tensor p =
        nn::forward(bundle_.discriminator.spec, dview,
                    models::condition(fake, nn::embed(*bundle_.d_embedding, labels)),
                    nn::Mode::eval)
            .output;
    const Tensor loss = losses::g_loss(cfg_.g_objective, p);
    const double v = checked(loss);
    std::vector<Tensor> wrt = gp.params;
    wrt.push_back(gemb);
    std::vector<Tensor> grads = grad(loss, wrt);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(g_player_, grads);
    return v;
  }

  // ---- code-recovery updates ----

  double d_step_infogan() {
    const Tensor real = toydata::sample(dist(), cfg_.batch, data_rng_);
    const std::vector<int> codes = uniform_labels(cfg_.batch, cfg_.dims.code_k, label_rng_);
    const Tensor z = normal_tensor(cfg_.batch, cfg_.dims.z_dim, z_rng_);
    const Tensor fake = forward_values(
        bundle_.generator, models::condition(z, one_hot(codes, cfg_.dims.code_k)));

    auto g = Graph::create();
    nn::ParameterSet dp = nn::attach(g, bundle_.discriminator.params);
    const Tensor p_real =
        nn::forward(bundle_.discriminator.spec, dp, real, nn::Mode::train).output;
    const Tensor p_fake =
        nn::forward(bundle_.discriminator.spec, dp, fake, nn::Mode::train).output;
    const Tensor loss = losses::d_loss_minimax(p_real, p_fake, cfg_.reg.smoothing);
    const double v = checked(loss);
    std::vector<Tensor> grads = grad(loss, dp.params);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(d_player_, grads);
    bundle_.discriminator.params.sn_u = dp.sn_u;
    return v;
  }

  double g_step_infogan() {
    const std::vector<int> codes = uniform_labels(cfg_.batch, cfg_.dims.code_k, label_rng_);
    const Tensor z = normal_tensor(cfg_.batch, cfg_.dims.z_dim, z_rng_);
    auto g = Graph::create();
    nn::ParameterSet gp = nn::attach(g, bundle_.generator.params);
    nn::ParameterSet qp = nn::attach(g, bundle_.q_network->params);
    const Tensor fake =
        nn::forward(bundle_.generator.spec, gp,
                    models::condition(z, one_hot(codes, cfg_.dims.code_k)), nn::Mode::train)
            .output;
    nn::ParameterSet dview = bundle_.discriminator.params;
    const Tensor p =
        nn::forward(bundle_.discriminator.spec, dview, fake, nn::Mode::eval).output;
    const Tensor q_logits =
        nn::forward(bundle_.q_network->spec, qp, fake, nn::Mode::train).output;
    // Adversarial term plus the code-recovery term, updating G and Q jointly.
    const Tensor loss = add(losses::g_loss(cfg_.g_objective, p),
                            losses::infogan_aux_loss(q_logits, codes));
    const double v = checked(loss);
    std::vector<Tensor> wrt = gp.params;
    for (const Tensor& t : qp.params) wrt.push_back(t);
    std::vector<Tensor> grads = grad(loss, wrt);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    const std::size_t ng = gp.params.size();
    std::vector<Tensor> g_grads(grads.begin(), grads.begin() + static_cast<std::ptrdiff_t>(ng));
    std::vector<Tensor> q_grads(grads.begin() + static_cast<std::ptrdiff_t>(ng), grads.end());
    step_player(g_player_, g_grads);
    step_player(*q_player_, q_grads);
    return v;
  }

  // ---- autoencoder-energy updates ----

  double d_step_ebgan() {
    const Tensor real = toydata::sample(dist(), cfg_.batch, data_rng_);
    const Tensor fake =
        forward_values(bundle_.generator, normal_tensor(cfg_.batch, cfg_.dims.z_dim, z_rng_));
    auto g = Graph::create();
    nn::ParameterSet dp = nn::attach(g, bundle_.discriminator.params);
    const Tensor e_real = row_energy(
        real, nn::forward(bundle_.discriminator.spec, dp, real, nn::Mode::train).output);
    const Tensor e_fake = row_energy(
        fake, nn::forward(bundle_.discriminator.spec, dp, fake, nn::Mode::train).output);
    const Tensor loss = losses::ebgan_losses(e_real, e_fake).d_loss;
    const double v = checked(loss);
    std::vector<Tensor> grads = grad(loss, dp.params);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(d_player_, grads);
    bundle_.discriminator.params.sn_u = dp.sn_u;
    return v;
  }

  double g_step_ebgan() {
    auto g = Graph::create();
    nn::ParameterSet gp = nn::attach(g, bundle_.generator.params);
    const Tensor fake =
        nn::forward(bundle_.generator.spec, gp,
                    normal_tensor(cfg_.batch, cfg_.dims.z_dim, z_rng_), nn::Mode::train)
            .output;
    nn::ParameterSet dview = bundle_.discriminator.params;
    const Tensor recon =
        nn::forward(bundle_.discriminator.spec, dview, fake, nn::Mode::eval).output;
    const Tensor energy = row_energy(fake, recon);
    const Tensor loss = losses::ebgan_losses(energy, energy).g_loss;
    const double v = checked(loss);
    std::vector<Tensor> grads = grad(loss, gp.params);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(g_player_, grads);
    return v;
  }

  // ---- adversarial-autoencoder step (three phases) ----

  void step_aae(int s) {
    const int latent = models::autoencoder_latent_dim(cfg_.dims);

    // Reconstruction: encoder + decoder minimize the autoencoding error.
    {
      const Tensor x = toydata::sample(dist(), cfg_.batch, data_rng_);
      auto g = Graph::create();
      nn::ParameterSet ep = nn::attach(g, bundle_.encoder->params);
      nn::ParameterSet dcp = nn::attach(g, bundle_.generator.params);
      const Tensor code = nn::forward(bundle_.encoder->spec, ep, x, nn::Mode::train).output;
      const Tensor recon = nn::forward(bundle_.generator.spec, dcp, code, nn::Mode::train).output;
      const Tensor rloss = mean(square(sub(recon, x)));
      last_recon_loss_ = checked(rloss);
      std::vector<Tensor> wrt = ep.params;
      for (const Tensor& t : dcp.params) wrt.push_back(t);
      std::vector<Tensor> grads = grad(rloss, wrt);
      nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
      const std::size_t ne = ep.params.size();
      std::vector<Tensor> e_grads(grads.begin(), grads.begin() + static_cast<std::ptrdiff_t>(ne));
      std::vector<Tensor> d_grads(grads.begin() + static_cast<std::ptrdiff_t>(ne), grads.end());
      step_player(*enc_player_, e_grads);
      step_player(g_player_, d_grads);
    }

    // Latent critic: prior draws are real, encoded data are fake.
    for (int it = 0; it < cfg_.n_critic; ++it) {
      const Tensor x = toydata::sample(dist(), cfg_.batch, data_rng_);
      const Tensor prior = normal_tensor(cfg_.batch, latent, z_rng_);
      const Tensor codes = forward_values(*bundle_.encoder, x);
      auto g = Graph::create();
      nn::ParameterSet dp = nn::attach(g, bundle_.discriminator.params);
      const Tensor p_real =
          nn::forward(bundle_.discriminator.spec, dp, prior, nn::Mode::train).output;
      const Tensor p_fake =
          nn::forward(bundle_.discriminator.spec, dp, codes, nn::Mode::train).output;
      const Tensor loss = losses::d_loss_minimax(p_real, p_fake, cfg_.reg.smoothing);
      last_d_loss_ = checked(loss);
      std::vector<Tensor> grads = grad(loss, dp.params);
      nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
      step_player(d_player_, grads);
      bundle_.discriminator.params.sn_u = dp.sn_u;
      ++d_updates_;
      if (hooks_.on_critic_step) hooks_.on_critic_step(s, it, bundle_);
    }

    // Adversarial: the encoder pushes its codes toward the prior.
    {
      const Tensor x = toydata::sample(dist(), cfg_.batch, data_rng_);
      auto g = Graph::create();
      nn::ParameterSet ep = nn::attach(g, bundle_.encoder->params);
      const Tensor code = nn::forward(bundle_.encoder->spec, ep, x, nn::Mode::train).output;
      nn::ParameterSet dview = bundle_.discriminator.params;
      const Tensor p =
          nn::forward(bundle_.discriminator.spec, dview, code, nn::Mode::eval).output;
      const Tensor aloss = losses::g_loss(cfg_.g_objective, p);
      const double av = checked(aloss);
      std::vector<Tensor> grads = grad(aloss, ep.params);
      nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
      step_player(*enc_player_, grads);
      last_g_loss_ = last_recon_loss_ + av;
    }
    ++g_updates_;
  }

  // ---- paired-translation updates ----

  double d_step_pix2pix() {
    const toydata::PairedSet ps = toydata::sample_paired(cfg_.batch, data_rng_);
    const Tensor fake_y = forward_values(bundle_.generator, ps.x);
    auto g = Graph::create();
    nn::ParameterSet dp = nn::attach(g, bundle_.discriminator.params);
    const Tensor v_real = nn::forward(bundle_.discriminator.spec, dp,
                                      concat(ps.x, ps.y, 1), nn::Mode::train)
                              .output;
    const Tensor v_fake = nn::forward(bundle_.discriminator.spec, dp,
                                      concat(ps.x, fake_y, 1), nn::Mode::train)
                              .output;
    const Tensor loss = losses::lsgan_losses(v_real, v_fake).d_loss;
    const double v = checked(loss);
    std::vector<Tensor> grads = grad(loss, dp.params);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(d_player_, grads);
    bundle_.discriminator.params.sn_u = dp.sn_u;
    return v;
  }

  double g_step_pix2pix() {
    const toydata::PairedSet ps = toydata::sample_paired(cfg_.batch, data_rng_);
    auto g = Graph::create();
    nn::ParameterSet gp = nn::attach(g, bundle_.generator.params);
    const Tensor fake_y =
        nn::forward(bundle_.generator.spec, gp, ps.x, nn::Mode::train).output;
    nn::ParameterSet dview = bundle_.discriminator.params;
    const Tensor v_fake = nn::forward(bundle_.discriminator.spec, dview,
                                      concat(ps.x, fake_y, 1), nn::Mode::eval)
                              .output;
    const Tensor adv = losses::lsgan_losses(v_fake, v_fake).g_loss;
    const Tensor loss = losses::pix2pix_g_loss(adv, fake_y, ps.y, cfg_.reg.l1_lambda);
    const double v = checked(loss);
    std::vector<Tensor> grads = grad(loss, gp.params);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(g_player_, grads);
    return v;
  }

  // ---- two-domain cycle updates ----

  double d_step_cyclegan() {
    const toydata::TwoDomainSet td = toydata::sample_two_domain(cfg_.batch, data_rng_);
    const Tensor fake_b = forward_values(bundle_.generator, td.a);
    const Tensor fake_a = forward_values(*bundle_.generator_b, td.b);
    auto g = Graph::create();
    nn::ParameterSet dbp = nn::attach(g, bundle_.discriminator.params);
    nn::ParameterSet dap = nn::attach(g, bundle_.discriminator_b->params);
    const auto score_b = [&](const Tensor& x) {
      return nn::forward(bundle_.discriminator.spec, dbp, x, nn::Mode::train).output;
    };
    const auto score_a = [&](const Tensor& x) {
      return nn::forward(bundle_.discriminator_b->spec, dap, x, nn::Mode::train).output;
    };
    const Tensor loss = add(losses::lsgan_losses(score_b(td.b), score_b(fake_b)).d_loss,
                            losses::lsgan_losses(score_a(td.a), score_a(fake_a)).d_loss);
    const double v = checked(loss);
    std::vector<Tensor> wrt = dbp.params;
    for (const Tensor& t : dap.params) wrt.push_back(t);
    std::vector<Tensor> grads = grad(loss, wrt);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(d_player_, grads);
    bundle_.discriminator.params.sn_u = dbp.sn_u;
    bundle_.discriminator_b->params.sn_u = dap.sn_u;
    return v;
  }

  double g_step_cyclegan() {
    const toydata::TwoDomainSet td = toydata::sample_two_domain(cfg_.batch, data_rng_);
    auto g = Graph::create();
    nn::ParameterSet gab = nn::attach(g, bundle_.generator.params);
    nn::ParameterSet gba = nn::attach(g, bundle_.generator_b->params);
    const Tensor fake_b =
        nn::forward(bundle_.generator.spec, gab, td.a, nn::Mode::train).output;
    const Tensor fake_a =
        nn::forward(bundle_.generator_b->spec, gba, td.b, nn::Mode::train).output;
    nn::ParameterSet db = bundle_.discriminator.params;
    nn::ParameterSet da = bundle_.discriminator_b->params;
    const Tensor vb =
        nn::forward(bundle_.discriminator.spec, db, fake_b, nn::Mode::eval).output;
    const Tensor va =
        nn::forward(bundle_.discriminator_b->spec, da, fake_a, nn::Mode::eval).output;
    const Tensor rec_a =
        nn::forward(bundle_.generator_b->spec, gba, fake_b, nn::Mode::train).output;
    const Tensor rec_b =
        nn::forward(bundle_.generator.spec, gab, fake_a, nn::Mode::train).output;
    const Tensor cyc = losses::cycle_loss(td.a, rec_a, td.b, rec_b);
    const Tensor loss = add(add(losses::lsgan_losses(vb, vb).g_loss,
                                losses::lsgan_losses(va, va).g_loss),
                            scale(cyc, cfg_.reg.cycle_lambda));
    const double v = checked(loss);
    std::vector<Tensor> wrt = gab.params;
    for (const Tensor& t : gba.params) wrt.push_back(t);
    std::vector<Tensor> grads = grad(loss, wrt);
    nn::clip_gradient(grads, cfg_.reg.grad_clip_mode, cfg_.reg.grad_clip_bound);
    step_player(g_player_, grads);
    return v;
  }

  // ---- outer step dispatch ----

  void step_once(int s) {
    const auto alg = cfg_.algorithm;
    if (alg == Algorithm::aae) {
      step_aae(s);
      return;
    }
    for (int it = 0; it < cfg_.n_critic; ++it) {
      switch (alg) {
        case Algorithm::cgan:
          last_d_loss_ = d_step_cgan();
          break;
        case Algorithm::infogan:
          last_d_loss_ = d_step_infogan();
          break;
        case Algorithm::ebgan:
          last_d_loss_ = d_step_ebgan();
          break;
        case Algorithm::pix2pix_toy:
          last_d_loss_ = d_step_pix2pix();
          break;
        case Algorithm::cyclegan_toy:
          last_d_loss_ = d_step_cyclegan();
          break;
        default:
          last_d_loss_ =
              critic_update(bundle_.discriminator, d_player_, data_rng_, z_rng_, false);
          break;
      }
      ++d_updates_;
      if (hooks_.on_critic_step) hooks_.on_critic_step(s, it, bundle_);
    }
    switch (alg) {
      case Algorithm::cgan:
        last_g_loss_ = g_step_cgan();
        break;
      case Algorithm::infogan:
        last_g_loss_ = g_step_infogan();
        break;
      case Algorithm::ebgan:
        last_g_loss_ = g_step_ebgan();
        break;
      case Algorithm::pix2pix_toy:
        last_g_loss_ = g_step_pix2pix();
        break;
      case Algorithm::cyclegan_toy:
        last_g_loss_ = g_step_cyclegan();
        break;
      default:
        last_g_loss_ = g_step_uncond();
        break;
    }
    ++g_updates_;
  }

  // ---- evaluation ----

  Tensor real_eval(int n, Rng& er) {
    if (std::holds_alternative<PairedData>(cfg_.data)) return toydata::sample_paired(n, er).y;
    if (std::holds_alternative<TwoDomainData>(cfg_.data)) {
      return toydata::sample_two_domain(n, er).b;
    }
    return toydata::sample(dist(), n, er);
  }

  double eval_d_accuracy(const Tensor& fake, const Tensor& real, Rng& er) {
    const auto alg = cfg_.algorithm;
    const bool prob = prob_head(alg);
    switch (alg) {
      case Algorithm::cgan: {
        const auto& lab = std::get<toydata::LabeledMixture>(dist());
        const int m = cfg_.eval_samples;
        const auto rl = toydata::sample_labeled(lab, m, er);
        const std::vector<int> y_fake = uniform_labels(m, cfg_.dims.num_classes, er);
        const Tensor fx = generate_with_labels(bundle_, y_fake, er);
        const Tensor p_r = forward_values(
            bundle_.discriminator,
            models::condition(rl.first, nn::embed(*bundle_.d_embedding, rl.second)));
        const Tensor p_f = forward_values(
            bundle_.discriminator,
            models::condition(fx, nn::embed(*bundle_.d_embedding, y_fake)));
        return metrics::d_accuracy(as_probs(p_r, prob), as_probs(p_f, prob));
      }
      case Algorithm::ebgan: {
        // Energies split at their pooled mean: low energy reads as real.
        const Tensor e_r = row_energy(real, forward_values(bundle_.discriminator, real));
        const Tensor e_f = row_energy(fake, forward_values(bundle_.discriminator, fake));
        double tau = 0.0;
        for (double v : e_r.values()) tau += v;
        for (double v : e_f.values()) tau += v;
        tau /= static_cast<double>(e_r.size() + e_f.size());
        std::vector<double> p_r(e_r.size()), p_f(e_f.size());
        for (std::size_t i = 0; i < p_r.size(); ++i) {
          p_r[i] = sigmoid_value(tau - e_r.values()[i]);
        }
        for (std::size_t i = 0; i < p_f.size(); ++i) {
          p_f[i] = sigmoid_value(tau - e_f.values()[i]);
        }
        return metrics::d_accuracy(p_r, p_f);
      }
      case Algorithm::aae: {
        const int latent = models::autoencoder_latent_dim(cfg_.dims);
        const Tensor prior = normal_tensor(real.rows(), latent, er);
        const Tensor codes = forward_values(*bundle_.encoder, real);
        const Tensor p_r = forward_values(bundle_.discriminator, prior);
        const Tensor p_f = forward_values(bundle_.discriminator, codes);
        return metrics::d_accuracy(as_probs(p_r, prob), as_probs(p_f, prob));
      }
      case Algorithm::pix2pix_toy: {
        const toydata::PairedSet ps = toydata::sample_paired(cfg_.eval_samples, er);
        const Tensor fy = forward_values(bundle_.generator, ps.x);
        const Tensor v_r =
            forward_values(bundle_.discriminator, concat(ps.x, ps.y, 1).detached());
        const Tensor v_f =
            forward_values(bundle_.discriminator, concat(ps.x, fy, 1).detached());
        return metrics::d_accuracy(as_probs(v_r, prob), as_probs(v_f, prob));
      }
      case Algorithm::cyclegan_toy: {
        const toydata::TwoDomainSet td = toydata::sample_two_domain(cfg_.eval_samples, er);
        const Tensor fb = forward_values(bundle_.generator, td.a);
        const Tensor v_r = forward_values(bundle_.discriminator, td.b);
        const Tensor v_f = forward_values(bundle_.discriminator, fb);
        return metrics::d_accuracy(as_probs(v_r, prob), as_probs(v_f, prob));
      }
      default: {
        const int k = cfg_.dims.pack_k;
        const Tensor o_r = forward_values(bundle_.discriminator, models::pack(real, k));
        const Tensor o_f = forward_values(bundle_.discriminator, models::pack(fake, k));
        return metrics::d_accuracy(as_probs(o_r, prob), as_probs(o_f, prob));
      }
    }
  }

  void evaluate_now(long step) {
    Rng er = root_.split(1000 + static_cast<std::uint64_t>(step));
    const int k = cfg_.dims.pack_k;
    const int n = std::max(k, cfg_.eval_samples / k * k);  // keep batches packable
    const Tensor fake = generate_samples(bundle_, n, er);
    if (!fake.all_finite()) throw Diverged{};
    const Tensor real = real_eval(n, er);

    metrics::MetricsRecord rec;
    rec.step = step;
    rec.d_loss = last_d_loss_;
    rec.g_loss = last_g_loss_;
    const int d = fake.cols();
    double akl = 0.0, ajs = 0.0, aw1 = 0.0;
    for (int axis = 0; axis < d; ++axis) {
      const std::vector<double> fcol = column(fake, axis);
      const metrics::Histogram fh = metrics::histogram(fcol, cfg_.eval_bins, lo_, hi_);
      const metrics::Histogram th = metrics::histogram_from_probs(
          toydata::bin_probs(marginals_[static_cast<std::size_t>(axis)], cfg_.eval_bins, lo_,
                             hi_),
          lo_, hi_);
      akl += metrics::kl(fh, th);
      ajs += metrics::js(fh, th);
      aw1 += metrics::w1_exact(fcol, column(real, axis));
    }
    rec.kl = akl / d;
    rec.js = ajs / d;
    rec.w1 = aw1 / d;
    const metrics::ModeStats ms = metrics::mode_stats(fake, centers_, mode_sd_);
    rec.modes_covered = ms.modes_covered;
    rec.high_quality_fraction = ms.high_quality_fraction;
    rec.d_accuracy = eval_d_accuracy(fake, real, er);
    log_.records.push_back(rec);
    last_eval_samples_ = fake;
    if (hooks_.on_eval) hooks_.on_eval(rec);
  }

  // ---- state ----
  TrainConfig cfg_;
  TrainHooks hooks_;
  Rng root_;
  models::ModelBundle bundle_;
  Rng data_rng_, z_rng_, label_rng_, noise_rng_, dp_rng_, gp_rng_, replay_rng_;
  Rng unroll_data_rng_, unroll_z_rng_;
  ReplayBuffer replay_;
  Player d_player_, g_player_;
  std::optional<Player> q_player_, enc_player_;
  RunLog log_;
  long g_updates_ = 0;
  long d_updates_ = 0;
  double last_d_loss_ = std::numeric_limits<double>::quiet_NaN();
  double last_g_loss_ = std::numeric_limits<double>::quiet_NaN();
  double last_recon_loss_ = std::numeric_limits<double>::quiet_NaN();
  Tensor last_eval_samples_;
  std::vector<toydata::GaussMix1D> marginals_;
  Tensor centers_;
  double mode_sd_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
};

}  // namespace

TrainResult train(const TrainConfig& cfg, const TrainHooks& hooks) {
  Trainer trainer(resolve_config(cfg), hooks);
  return trainer.run();
}

}  // namespace ganlab::trainers
