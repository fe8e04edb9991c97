#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "ganlab/losses.hpp"
#include "ganlab/metrics.hpp"
#include "ganlab/models.hpp"
#include "ganlab/nn.hpp"
#include "ganlab/toydata.hpp"

namespace ganlab::trainers {

// Dataset selector: a synthetic distribution, the paired rotation fixture
// (x ~ N(0, I), y = Rot(pi/4) x + noise), or the two-domain translation
// fixture (ring A, scaled/shifted ring B).
struct PairedData {};
struct TwoDomainData {};
using DataSpec = std::variant<toydata::DistributionSpec, PairedData, TwoDomainData>;

int data_dim(const DataSpec& data);

// Stabilization and auxiliary-loss options. The options in the first block
// apply to the unconditional families (vanilla / wgan_clip / wgan_gp / lsgan
// / hinge); setting them on other algorithms is a config error. smoothing
// applies wherever a BCE discriminator loss is used; grad clipping applies
// to every update.
struct Regularizers {
  losses::SmoothingConfig smoothing;    // (1, 0) = off
  double input_noise_std = 0.0;         // added to both discriminator inputs
  int replay_capacity = 0;              // 0 = no replay buffer
  double replay_mix_fraction = 0.0;     // share of the fake batch replayed
  double dp_noise_std = 0.0;            // gaussian noise on critic gradients
  double feature_matching_weight = 0.0;
  bool spectral_norm = false;

  nn::ClipMode grad_clip_mode = nn::ClipMode::none;
  double grad_clip_bound = 0.0;

  double gp_lambda = 10.0;   // gradient penalty coefficient (wgan_gp)
  double clip_c = 0.01;      // weight clamp bound (wgan_clip)
  double l1_lambda = 100.0;  // reconstruction weight (pix2pix_toy)
  double cycle_lambda = 10.0;
};

struct TrainConfig {
  models::Algorithm algorithm = models::Algorithm::vanilla;
  DataSpec data;
  int steps = 1000;
  int batch = 64;
  int n_critic = 0;   // 0 = auto: 5 for the critic family, 1 otherwise
  int unroll_k = 0;   // simulated critic responses the generator sees through
  models::Dims dims;  // data_dim/num_classes 0 = derive from data
  losses::GeneratorObjective g_objective = losses::GeneratorObjective::nonsaturating;
  nn::OptimizerConfig g_opt;
  nn::OptimizerConfig d_opt;
  Regularizers reg;
  int eval_every = 200;
  int eval_samples = 2000;
  int eval_bins = 50;
  std::uint64_t seed = 1;
};

// Fills derived fields (data_dim, num_classes, pack_k mirror, n_critic) and
// validates the whole config; throws std::invalid_argument with the reason.
TrainConfig resolve_config(const TrainConfig& cfg);
int resolved_n_critic(const TrainConfig& cfg);

// Reservoir of past generated rows with uniform retention probability.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  // Reservoir-inserts every row of a [n x d] tensor.
  void insert(const Tensor& rows, Rng& rng);

  // One stored row, uniformly at random.
  std::vector<double> draw(Rng& rng) const;

  int size() const { return static_cast<int>(rows_.size()); }
  int capacity() const { return capacity_; }
  long insertions() const { return count_; }
  int dim() const { return dim_; }

 private:
  int capacity_ = 0;
  int dim_ = -1;
  long count_ = 0;
  std::vector<std::vector<double>> rows_;
};

// Replaces floor(mix_fraction * n) trailing rows of the fresh fake batch
// with uniform draws from the buffer (no-op while the buffer is empty), then
// reservoir-inserts all fresh rows.
Tensor replay_mix(ReplayBuffer& buffer, const Tensor& fresh, double mix_fraction, Rng& rng);

// x + stddev * N(0, I). stddev == 0 returns x unchanged. Keeps the graph
// attachment of x, so generator gradients pass through.
Tensor add_input_noise(const Tensor& x, double stddev, Rng& rng);

// Adds independent N(0, sigma^2) to every gradient entry.
std::vector<Tensor> dp_noise(std::vector<Tensor> grads, double sigma, Rng& rng);

// One completed (or diverged) training run.
struct RunLog {
  TrainConfig config;  // resolved echo
  std::vector<metrics::MetricsRecord> records;
  Tensor final_samples;
  double wall_time_s = 0.0;
  std::string status = "completed";  // "completed" | "diverged"
  long g_updates = 0;
  long d_updates = 0;
  long steps_completed = 0;
};

struct TrainHooks {
  // After every critic update: (outer step, critic iteration, live bundle).
  std::function<void(int, int, const models::ModelBundle&)> on_critic_step;
  std::function<void(const metrics::MetricsRecord&)> on_eval;
};

struct TrainResult {
  RunLog log;
  models::ModelBundle bundle;
};

// Runs the full alternating loop for cfg.algorithm: per outer step, n_critic
// discriminator updates on fresh real/fake batches with the configured
// stabilizers, then one generator update (scored against a k-step simulated
// critic response, differentiated through, when unroll_k > 0). Snapshots
// metrics at step 0, every
// eval_every steps, and at the end. Deterministic per config; a non-finite
// or |.| > 1e6 loss ends the run early with status "diverged" and a
// well-formed partial log.
TrainResult train(const TrainConfig& cfg, const TrainHooks& hooks = {});

// Draws n outputs from the bundle the way evaluation does (eval-mode
// forwards; labels/codes uniform where the roster needs them).
Tensor generate_samples(const models::ModelBundle& bundle, int n, Rng& rng);

// Conditional draws: one row per entry of labels (label-embedding roster)
// or codes (code-recovery roster).
Tensor generate_with_labels(const models::ModelBundle& bundle, const std::vector<int>& labels,
                            Rng& rng);
Tensor generate_with_codes(const models::ModelBundle& bundle, const std::vector<int>& codes,
                           Rng& rng);

}  // namespace ganlab::trainers
