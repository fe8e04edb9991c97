#include "ganlab/diffusion.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ganlab/autodiff.hpp"

namespace ganlab::diffusion {
namespace {

constexpr double kRunawayLoss = 1e6;

NoiseSchedule finish_schedule(int T, std::vector<double> beta) {
  NoiseSchedule s;
  s.T = T;
  s.beta = std::move(beta);
  s.alpha.reserve(static_cast<std::size_t>(T));
  s.alpha_bar.reserve(static_cast<std::size_t>(T));
  double prod = 1.0;
  for (double b : s.beta) {
    if (b < 0.0 || b >= 1.0) {
      throw std::invalid_argument("NoiseSchedule: beta must lie in [0, 1)");
    }
    s.alpha.push_back(1.0 - b);
    prod *= 1.0 - b;
    s.alpha_bar.push_back(prod);
  }
  return s;
}

void require_t(const NoiseSchedule& sched, int t, const char* where) {
  if (t < 1 || t > sched.T) {
    throw std::invalid_argument(std::string(where) + ": t must lie in [1, T]");
  }
}

Tensor normal_tensor(int rows, int cols, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (double& e : v) e = rng.normal();
  return Tensor(rows, cols, std::move(v));
}

// x_t rows built numerically for per-row timesteps, with t/T appended as the
// conditioning column. Also returns the noise that was mixed in (the
// regression target).
struct NoisedBatch {
  Tensor input;  // [n x (d + 1)]
  Tensor eps;    // [n x d]
};

NoisedBatch noise_batch(const Tensor& x0, const std::vector<int>& ts, const NoiseSchedule& sched,
                        Rng& rng) {
  const int n = x0.rows();
  const int d = x0.cols();
  std::vector<double> eps(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  for (double& e : eps) e = rng.normal();
  std::vector<double> in(static_cast<std::size_t>(n) * static_cast<std::size_t>(d + 1));
  for (int r = 0; r < n; ++r) {
    const int t = ts[static_cast<std::size_t>(r)];
    const double ab = sched.alpha_bar_at(t);
    const double c0 = std::sqrt(ab);
    const double ce = std::sqrt(1.0 - ab);
    for (int c = 0; c < d; ++c) {
      const std::size_t k = static_cast<std::size_t>(r) * d + c;
      in[static_cast<std::size_t>(r) * (d + 1) + c] = c0 * x0.at(r, c) + ce * eps[k];
    }
    in[static_cast<std::size_t>(r) * (d + 1) + d] =
        static_cast<double>(t) / static_cast<double>(sched.T);
  }
  NoisedBatch out;
  out.input = Tensor(n, d + 1, std::move(in));
  out.eps = Tensor(n, d, std::move(eps));
  return out;
}

std::vector<int> uniform_timesteps(int n, int T, Rng& rng) {
  std::vector<int> ts(static_cast<std::size_t>(n));
  for (int& t : ts) t = 1 + rng.uniform_int(T);
  return ts;
}

// mean over rows of ||eps_hat - eps||^2, as a graph op on eps_hat.
Tensor row_mse(const Tensor& eps_hat, const Tensor& eps) {
  return scale(mean(square(sub(eps_hat, eps))), static_cast<double>(eps.cols()));
}

}  // namespace

NoiseSchedule constant_schedule(int T, double beta) {
  if (T < 1) throw std::invalid_argument("constant_schedule: T must be positive");
  return finish_schedule(T, std::vector<double>(static_cast<std::size_t>(T), beta));
}

NoiseSchedule linear_schedule(int T, double beta_start, double beta_end) {
  if (T < 1) throw std::invalid_argument("linear_schedule: T must be positive");
  std::vector<double> beta(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const double frac = T == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(T - 1);
    beta[static_cast<std::size_t>(t)] = beta_start + frac * (beta_end - beta_start);
  }
  return finish_schedule(T, std::move(beta));
}

Tensor forward_step(const Tensor& x_prev, int t, const NoiseSchedule& sched, Rng& rng) {
  require_t(sched, t, "forward_step");
  const double keep = std::sqrt(1.0 - sched.beta_at(t));
  const double mix = std::sqrt(sched.beta_at(t));
  std::vector<double> v(x_prev.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = keep * x_prev.values()[i] + mix * rng.normal();
  }
  return Tensor(x_prev.rows(), x_prev.cols(), std::move(v));
}

Tensor forward_diffuse(const Tensor& x0, int t, const NoiseSchedule& sched, Rng& rng) {
  require_t(sched, t, "forward_diffuse");
  const double ab = sched.alpha_bar_at(t);
  const double c0 = std::sqrt(ab);
  const double ce = std::sqrt(1.0 - ab);
  std::vector<double> v(x0.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = c0 * x0.values()[i] + ce * rng.normal();
  }
  return Tensor(x0.rows(), x0.cols(), std::move(v));
}

Denoiser make_denoiser(int data_dim, const std::vector<int>& hidden, std::uint64_t seed) {
  if (data_dim < 1) throw std::invalid_argument("make_denoiser: data_dim must be positive");
  if (hidden.empty()) throw std::invalid_argument("make_denoiser: need at least one hidden layer");
  Denoiser den;
  den.spec.layer_sizes.push_back(data_dim + 1);
  for (int h : hidden) den.spec.layer_sizes.push_back(h);
  den.spec.layer_sizes.push_back(data_dim);
  den.spec.hidden_activation = nn::Activation::relu;
  den.spec.output_activation = nn::Activation::identity;
  den.params = nn::init_network(den.spec, seed);
  return den;
}

double denoiser_loss(const Denoiser& den, const NoiseSchedule& sched,
                     const toydata::DistributionSpec& dist, int batch, Rng& rng) {
  const Tensor x0 = toydata::sample(dist, batch, rng);
  const NoisedBatch nb = noise_batch(x0, uniform_timesteps(batch, sched.T, rng), sched, rng);
  nn::ParameterSet view = den.params;
  const Tensor eps_hat = nn::forward(den.spec, view, nb.input, nn::Mode::eval).output;
  return row_mse(eps_hat, nb.eps).item();
}

DenoiserResult train_denoiser(const DenoiserConfig& cfg) {
  if (cfg.steps < 1) throw std::invalid_argument("train_denoiser: steps must be positive");
  if (cfg.batch < 1) throw std::invalid_argument("train_denoiser: batch must be positive");
  if (cfg.eval_every < 1) throw std::invalid_argument("train_denoiser: eval_every must be positive");
  if (cfg.schedule.T < 1) throw std::invalid_argument("train_denoiser: schedule is empty");

  const Rng root(cfg.seed);
  Rng data_rng = root.split(2);
  Rng noise_rng = root.split(3);

  DenoiserResult res;
  res.denoiser =
      make_denoiser(toydata::dim(cfg.dist), cfg.hidden, root.split(1).next_u64());
  nn::OptimizerState opt = nn::make_optimizer(cfg.opt, res.denoiser.params);

  const auto t0 = std::chrono::steady_clock::now();
  for (int s = 1; s <= cfg.steps; ++s) {
    const Tensor x0 = toydata::sample(cfg.dist, cfg.batch, data_rng);
    const NoisedBatch nb =
        noise_batch(x0, uniform_timesteps(cfg.batch, cfg.schedule.T, noise_rng), cfg.schedule,
                    noise_rng);
    auto g = Graph::create();
    nn::ParameterSet p = nn::attach(g, res.denoiser.params);
    const Tensor eps_hat = nn::forward(res.denoiser.spec, p, nb.input, nn::Mode::train).output;
    const Tensor loss = row_mse(eps_hat, nb.eps);
    const double v = loss.item();
    if (!std::isfinite(v) || std::abs(v) > kRunawayLoss) {
      res.log.status = "diverged";
      break;
    }
    if (s == 1 || s == cfg.steps || s % cfg.eval_every == 0) {
      res.log.losses.emplace_back(s, v);
    }
    const std::vector<Tensor> grads = grad(loss, p.params);
    nn::optimizer_step(opt, res.denoiser.params, grads);
    res.log.steps_completed = s;
  }
  res.log.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

Tensor reverse_sample(const Denoiser& den, const NoiseSchedule& sched, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("reverse_sample: n must be positive");
  const int d = den.spec.output_dim();
  Tensor x = normal_tensor(n, d, rng);
  nn::ParameterSet view = den.params;
  for (int t = sched.T; t >= 1; --t) {
    // Append the conditioning column and predict the mixed-in noise.
    std::vector<double> in(static_cast<std::size_t>(n) * static_cast<std::size_t>(d + 1));
    const double tc = static_cast<double>(t) / static_cast<double>(sched.T);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < d; ++c) {
        in[static_cast<std::size_t>(r) * (d + 1) + c] = x.at(r, c);
      }
      in[static_cast<std::size_t>(r) * (d + 1) + d] = tc;
    }
    const Tensor eps_hat =
        nn::forward(den.spec, view, Tensor(n, d + 1, std::move(in)), nn::Mode::eval).output;

    const double beta = sched.beta_at(t);
    const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha_at(t));
    const double denom = std::sqrt(1.0 - sched.alpha_bar_at(t));
    const double coef = denom == 0.0 ? 0.0 : beta / denom;  // noise-free chain: identity
    const double sigma = t > 1 ? std::sqrt(beta) : 0.0;
    std::vector<double> next(x.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double mu = inv_sqrt_alpha * (x.values()[i] - coef * eps_hat.values()[i]);
      next[i] = sigma == 0.0 ? mu : mu + sigma * rng.normal();
    }
    x = Tensor(n, d, std::move(next));
  }
  return x;
}

}  // namespace ganlab::diffusion
