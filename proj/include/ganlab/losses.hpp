#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ganlab/autodiff.hpp"
#include "ganlab/rng.hpp"

namespace ganlab::losses {

// Which adversarial objective a run trains with. Each kind maps to exactly
// one (d_loss, g_loss) pair below.
enum class LossKind {
  minimax_bce,
  nonsaturating,
  wgan,
  wgan_gp,
  lsgan,
  hinge,
  ebgan,
  infogan_aux,
  pix2pix,
  cycle,
  feature_matching,
};

const char* loss_kind_name(LossKind k);

// One-sided label smoothing targets for the BCE discriminator loss.
// Requires 0 <= fake_target < real_target <= 1.
struct SmoothingConfig {
  double real_target = 1.0;
  double fake_target = 0.0;
};

struct LossPair {
  Tensor d_loss;
  Tensor g_loss;
};

// Clamps probabilities into [1e-12, 1 - 1e-12] so the logs below stay finite
// at saturated discriminator outputs while keeping the gradient's sign.
// Built from max_with so it differentiates (gradient 1 inside, 0 outside).
Tensor clamp_prob(const Tensor& p);

// Mean binary cross-entropy of probabilities p against a constant target t:
// -mean(t ln p + (1-t) ln(1-p)).
Tensor bce_against(const Tensor& p, double target);

// Discriminator BCE loss: BCE(p_real, real_target) + BCE(p_fake, fake_target),
// each term batch-meaned. With default smoothing and p_real = p_fake = 0.5
// this sits at its symmetric equilibrium value 2 ln 2.
Tensor d_loss_minimax(const Tensor& p_real, const Tensor& p_fake,
                      const SmoothingConfig& smoothing = {});

// The two classic generator objectives on discriminator probabilities:
// saturating minimizes mean ln(1 - p_fake); nonsaturating minimizes
// -mean ln p_fake (stronger gradient when the generator is losing).
enum class GeneratorObjective { saturating, nonsaturating };

Tensor g_loss(GeneratorObjective kind, const Tensor& p_fake);

// Critic objective on raw scores: d = mean(s_fake) - mean(s_real),
// g = -mean(s_fake). d is invariant under adding a constant to all scores.
LossPair wgan_losses(const Tensor& s_real, const Tensor& s_fake);

// Penalty pushing the critic's input gradient toward unit norm along random
// interpolates between real and fake rows. Per-row eps ~ U(0,1) mixes
// x_hat = eps*real + (1-eps)*fake; the critic is evaluated on x_hat attached
// to `graph`, its input gradient is taken with create_graph so the result is
// differentiable with respect to the critic's parameters, and the returned
// scalar is lambda * mean((||grad||_2 - 1)^2).
// Throws std::invalid_argument if the critic does not return one score per
// row, shapes differ, or lambda < 0.
Tensor gradient_penalty(const std::shared_ptr<Graph>& graph,
                        const std::function<Tensor(const Tensor&)>& critic, const Tensor& real,
                        const Tensor& fake, double lambda, Rng& rng);

// Least-squares objective on raw discriminator values:
// d = 1/2 mean((v_real - 1)^2) + 1/2 mean(v_fake^2); g = 1/2 mean((v_fake - 1)^2).
LossPair lsgan_losses(const Tensor& v_real, const Tensor& v_fake);

// Margin objective on raw scores: d = mean(max(0, 1 - s_real)) +
// mean(max(0, 1 + s_fake)); g = -mean(s_fake). Unlike the critic loss above,
// d is not translation invariant.
LossPair hinge_losses(const Tensor& s_real, const Tensor& s_fake);

// Energy objective where the discriminator is an autoencoder and the energy
// of a sample is its reconstruction error: d = mean(E_real) - mean(E_fake);
// g = mean(E_fake). Rejects negative energies.
LossPair ebgan_losses(const Tensor& recon_real, const Tensor& recon_fake);

// Categorical cross-entropy of the code-recovery head: -mean over rows of
// log-softmax(q_logits)[row, code]. Codes must lie in [0, k).
Tensor infogan_aux_loss(const Tensor& q_logits, const std::vector<int>& codes);

// Paired-translation generator objective: adversarial term plus
// lambda_l1 * mean|y_hat - y|.
Tensor pix2pix_g_loss(const Tensor& adv_term, const Tensor& y_hat, const Tensor& y,
                      double lambda_l1);

// Round-trip consistency: mean|x_rec - x| + mean|y_rec - y|.
Tensor cycle_loss(const Tensor& x, const Tensor& x_rec, const Tensor& y, const Tensor& y_rec);

// Squared distance between batch-mean feature vectors:
// ||mean_rows(f_real) - mean_rows(f_fake)||_2^2. Row counts may differ;
// feature widths must match.
Tensor feature_matching_loss(const Tensor& f_real, const Tensor& f_fake);

}  // namespace ganlab::losses
