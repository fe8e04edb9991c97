#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ganlab/nn.hpp"

namespace ganlab::models {

// Training algorithm families. Each value selects a loss pair, a network
// roster, and an update schedule.
enum class Algorithm {
  vanilla,
  wgan_clip,
  wgan_gp,
  lsgan,
  hinge,
  cgan,
  infogan,
  ebgan,
  aae,
  pix2pix_toy,
  cyclegan_toy,
};

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);  // throws on unknown names
std::vector<Algorithm> all_algorithms();

// The two critic-style algorithms that train the discriminator several times
// per generator step by default and use raw (identity-head) scores.
bool is_wgan_family(Algorithm a);

// Width knobs for a bundle. data_dim is required; everything else has the
// defaults used throughout: 100-dim noise, two 128-unit hidden layers.
struct Dims {
  int z_dim = 100;
  int data_dim = 0;
  std::vector<int> hidden = {128, 128};
  int pack_k = 1;        // rows grouped per discriminator input
  int num_classes = 0;   // label count (conditional runs)
  int code_k = 0;        // categorical code size (code-recovery runs)
  int embed_dim = 0;     // label embedding width; 0 means num_classes
  bool spectral_norm = false;

  int effective_embed_dim() const { return embed_dim > 0 ? embed_dim : num_classes; }
};

// Latent width used by the autoencoder rosters (EBGAN bottleneck, AAE code):
// max(2, data_dim).
int autoencoder_latent_dim(const Dims& dims);

struct Network {
  nn::NetworkSpec spec;
  nn::ParameterSet params;
};

// Full network roster for one run. generator/discriminator are always
// present; the optional slots are filled per algorithm:
//   cyclegan_toy: generator maps A->B, generator_b maps B->A, with a
//     discriminator per domain;
//   aae: encoder maps data->latent, generator doubles as the decoder
//     (latent->data), and the discriminator judges latent codes;
//   ebgan: the discriminator is an autoencoder whose reconstruction error is
//     the sample's energy;
//   infogan: q_network recovers the categorical code from generated samples;
//   cgan: per-network label embedding tables.
struct ModelBundle {
  Algorithm algorithm = Algorithm::vanilla;
  Dims dims;
  Network generator;
  Network discriminator;
  std::optional<Network> generator_b;
  std::optional<Network> discriminator_b;
  std::optional<Network> encoder;
  std::optional<Network> q_network;
  std::optional<Tensor> g_embedding;
  std::optional<Tensor> d_embedding;
};

// Wires the specs for one algorithm and initializes all parameters
// deterministically from the seed. Throws std::invalid_argument on
// inconsistent dims (missing num_classes for conditional runs, pack_k > 1 on
// a roster that cannot pack, non-positive widths).
ModelBundle build_bundle(Algorithm algorithm, const Dims& dims, std::uint64_t seed);

// Deep copy (distinct parameter buffers) for evaluation snapshots and
// unrolled lookahead copies.
ModelBundle clone_bundle(const ModelBundle& bundle);

// Groups consecutive runs of k rows into single wide rows:
// [n x d] -> [n/k x k*d], order preserving. Built from graph ops, so
// gradients flow back to every original row. k == 1 returns the input.
// Throws std::invalid_argument when k does not divide n.
Tensor pack(const Tensor& batch, int k);

// Inverse reshaping of pack (numeric only, no gradient): [m x k*d] -> [m*k x d].
Tensor unpack(const Tensor& packed, int k);

// Feature-wise concatenation of noise (or data) with per-row conditioning
// vectors. Throws on row-count mismatch.
Tensor condition(const Tensor& z, const Tensor& label_vecs);

}  // namespace ganlab::models
