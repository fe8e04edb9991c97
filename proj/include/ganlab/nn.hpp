#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ganlab/autodiff.hpp"
#include "ganlab/rng.hpp"
#include "ganlab/tensor.hpp"

namespace ganlab::nn {

enum class Activation { identity, relu, leaky_relu, tanh, sigmoid };

const char* activation_name(Activation a);

// Fully connected stack: layer_sizes = [in, h1, ..., out]. Hidden layers all
// use hidden_activation; the last layer uses output_activation. When
// spectral_norm is set every weight matrix is divided by its estimated top
// singular value on the way through forward().
struct NetworkSpec {
  std::vector<int> layer_sizes;
  Activation hidden_activation = Activation::leaky_relu;
  double leaky_slope = 0.2;
  Activation output_activation = Activation::identity;
  bool spectral_norm = false;
  // Index of the hidden layer (0-based, counting post-activation outputs)
  // whose activations forward() should expose, or -1 for none.
  int feature_tap = -1;

  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
};

// Trainable state. params holds W0, b0, W1, b1, ... with W [out x in] and
// b [1 x out]. sn_u holds one unit row vector per layer when spectral norm is
// on (power-iteration state, not trained). Order is stable across save/load.
struct ParameterSet {
  std::vector<Tensor> params;
  std::vector<Tensor> sn_u;
};

// He normal (std = sqrt(2 / fan_in)) ahead of relu-family activations,
// Xavier uniform (limit = sqrt(6 / (fan_in + fan_out))) otherwise.
// Biases start at zero. Deterministic per seed.
ParameterSet init_network(const NetworkSpec& spec, std::uint64_t seed);

enum class Mode { train, eval };

struct ForwardResult {
  Tensor output;
  std::optional<Tensor> tapped;
};

// Runs the stack on a [batch x in] tensor. In train mode each
// spectral-normalized layer runs one power-iteration refinement and stores
// the updated u; eval mode reuses the stored u untouched.
ForwardResult forward(const NetworkSpec& spec, ParameterSet& params, const Tensor& x,
                      Mode mode = Mode::train);

// Power iteration estimate of the top singular value: iters rounds of
// v = normalize(W^T u), u = normalize(W v), then sigma = u^T W v.
struct SpectralResult {
  double sigma = 0.0;
  Tensor w_hat;  // W / sigma
  Tensor u;      // refined left vector, unit norm
};
SpectralResult spectral_normalize(const Tensor& w, const Tensor& u, int iters);

// ---- optimizers -----------------------------------------------------------

enum class OptimizerKind { sgd, adam, rmsprop };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double lr = 2e-4;
  double beta1 = 0.5;    // adam
  double beta2 = 0.999;  // adam
  double alpha = 0.99;   // rmsprop smoothing
  double eps = 1e-8;
};

struct OptimizerState {
  OptimizerConfig cfg;
  std::vector<std::vector<double>> m;  // adam first moment / rmsprop mean square
  std::vector<std::vector<double>> v;  // adam second moment
  long step_count = 0;
};

OptimizerState make_optimizer(const OptimizerConfig& cfg, const ParameterSet& params);

// One update in place. grads must match params entry for entry. Adam uses
// bias-corrected moments; rmsprop divides by sqrt of the running mean square.
void optimizer_step(OptimizerState& opt, ParameterSet& params, const std::vector<Tensor>& grads);

// Clamp every parameter entry to [-c, c] (the WGAN weight clip).
void clip_weight_values(ParameterSet& params, double c);

enum class ClipMode { none, value, norm };

// value: clamp each gradient entry to [-bound, bound]. norm: if the global
// l2 norm across all gradients exceeds bound, rescale them all by
// bound / norm.
void clip_gradient(std::vector<Tensor>& grads, ClipMode mode, double bound);

// ---- embeddings -------------------------------------------------------------

// [num_classes x embed_dim] table; lookup is a row gather whose gradient
// lands only on the selected rows.
Tensor init_embedding(int num_classes, int embed_dim, std::uint64_t seed);
Tensor embed(const Tensor& table, const std::vector<int>& labels);

// ---- persistence ------------------------------------------------------------

// JSON: {"params": [{"rows":r,"cols":c,"values":[...]}...], "sn_u": [...]}.
std::string save_params(const ParameterSet& params);
ParameterSet load_params(const std::string& text);
void save_params_file(const ParameterSet& params, const std::string& path);
ParameterSet load_params_file(const std::string& path);

// Deep copy helper (tensors are copy-on-write; this forces distinct buffers
// so in-place experiments cannot alias).
ParameterSet clone(const ParameterSet& params);

// Leaf copies of every trainable tensor on the given graph, so one training
// step can differentiate with respect to them. sn_u buffers stay detached.
ParameterSet attach(const std::shared_ptr<Graph>& g, const ParameterSet& params);

}  // namespace ganlab::nn
