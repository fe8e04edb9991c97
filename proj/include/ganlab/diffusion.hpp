#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ganlab/nn.hpp"
#include "ganlab/rng.hpp"
#include "ganlab/tensor.hpp"
#include "ganlab/toydata.hpp"

namespace ganlab::diffusion {

// Variance schedule for the forward noising chain
// q(x_t | x_{t-1}) = N(sqrt(1 - beta_t) x_{t-1}, beta_t I), together with the
// cumulative products the closed-form jump and the sampler need. Index t is
// 1-based: beta[t - 1] = beta_t. beta_t = 0 is allowed (a degenerate
// noise-free chain, useful for identity checks); positive betas must stay
// below 1 so alpha_bar decreases strictly.
struct NoiseSchedule {
  int T = 0;
  std::vector<double> beta;
  std::vector<double> alpha;      // 1 - beta_t
  std::vector<double> alpha_bar;  // running product of alpha

  double beta_at(int t) const { return beta[static_cast<std::size_t>(t - 1)]; }
  double alpha_at(int t) const { return alpha[static_cast<std::size_t>(t - 1)]; }
  double alpha_bar_at(int t) const { return alpha_bar[static_cast<std::size_t>(t - 1)]; }
};

NoiseSchedule constant_schedule(int T, double beta = 0.01);
NoiseSchedule linear_schedule(int T, double beta_start = 1e-4, double beta_end = 0.02);

// One forward step: sqrt(1 - beta_t) x_prev + sqrt(beta_t) eps.
Tensor forward_step(const Tensor& x_prev, int t, const NoiseSchedule& sched, Rng& rng);

// The closed-form jump to step t:
// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps. Distributionally
// equal to composing forward_step t times. Throws when t is outside [1, T].
Tensor forward_diffuse(const Tensor& x0, int t, const NoiseSchedule& sched, Rng& rng);

// Noise-prediction network: input (x_t with t/T appended per row), output a
// predicted eps of the data dimension.
struct Denoiser {
  nn::NetworkSpec spec;
  nn::ParameterSet params;
};

Denoiser make_denoiser(int data_dim, const std::vector<int>& hidden, std::uint64_t seed);

struct DenoiserConfig {
  toydata::DistributionSpec dist;
  NoiseSchedule schedule;
  int steps = 2000;
  int batch = 64;
  std::vector<int> hidden = {128, 128};
  nn::OptimizerConfig opt = {nn::OptimizerKind::adam, 1e-3, 0.9, 0.999, 0.99, 1e-8};
  int eval_every = 500;
  std::uint64_t seed = 1;
};

struct DenoiserLog {
  // (step, minibatch loss before that step's update); includes the first and
  // final steps, so front() is the at-initialization loss.
  std::vector<std::pair<long, double>> losses;
  double wall_time_s = 0.0;
  std::string status = "completed";  // "completed" | "diverged"
  long steps_completed = 0;
};

struct DenoiserResult {
  Denoiser denoiser;
  DenoiserLog log;
};

// Per-row expected squared error mean ||eps_hat - eps||^2 on one fresh batch
// (so a zero-output network scores ~data_dim against unit-normal noise).
double denoiser_loss(const Denoiser& den, const NoiseSchedule& sched,
                     const toydata::DistributionSpec& dist, int batch, Rng& rng);

// Minimizes that loss by Adam on per-row uniform timesteps. Deterministic per
// seed; a non-finite or runaway loss ends the run with status "diverged".
DenoiserResult train_denoiser(const DenoiserConfig& cfg);

// Ancestral sampling from x_T ~ N(0, I):
// x_{t-1} = (x_t - beta_t / sqrt(1 - alpha_bar_t) * eps_hat) / sqrt(alpha_t)
//           + sigma_t z,  sigma_t = sqrt(beta_t) for t > 1, sigma_1 = 0.
// A noise-free schedule degenerates to the identity chain (returns x_T).
Tensor reverse_sample(const Denoiser& den, const NoiseSchedule& sched, int n, Rng& rng);

}  // namespace ganlab::diffusion
