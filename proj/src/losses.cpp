#include "ganlab/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace ganlab::losses {

namespace {

constexpr double kProbEps = 1e-12;

void require_defined(const Tensor& t, const char* who) {
  if (!t.defined()) throw std::invalid_argument(std::string(who) + ": undefined tensor");
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(who) + ": shape mismatch " + a.shape_str() + " vs " +
                                b.shape_str());
  }
}

Tensor clamped_log(const Tensor& p) { return log(clamp_prob(p)); }

}  // namespace

const char* loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::minimax_bce: return "minimax_bce";
    case LossKind::nonsaturating: return "nonsaturating";
    case LossKind::wgan: return "wgan";
    case LossKind::wgan_gp: return "wgan_gp";
    case LossKind::lsgan: return "lsgan";
    case LossKind::hinge: return "hinge";
    case LossKind::ebgan: return "ebgan";
    case LossKind::infogan_aux: return "infogan_aux";
    case LossKind::pix2pix: return "pix2pix";
    case LossKind::cycle: return "cycle";
    case LossKind::feature_matching: return "feature_matching";
  }
  return "?";
}

Tensor clamp_prob(const Tensor& p) {
  require_defined(p, "clamp_prob");
  // clamp(p, lo, hi) = -max(-max(p, lo), -hi)
  return neg(max_with(neg(max_with(p, kProbEps)), -(1.0 - kProbEps)));
}

Tensor bce_against(const Tensor& p, double target) {
  require_defined(p, "bce_against");
  if (target < 0.0 || target > 1.0) {
    throw std::invalid_argument("bce_against: target must lie in [0, 1]");
  }
  const Tensor one_minus = sub(Tensor::scalar(1.0), p);
  const Tensor term =
      add(scale(clamped_log(p), target), scale(clamped_log(one_minus), 1.0 - target));
  return neg(mean(term));
}

Tensor d_loss_minimax(const Tensor& p_real, const Tensor& p_fake,
                      const SmoothingConfig& smoothing) {
  if (!(0.0 <= smoothing.fake_target && smoothing.fake_target < smoothing.real_target &&
        smoothing.real_target <= 1.0)) {
    throw std::invalid_argument("d_loss_minimax: need 0 <= fake_target < real_target <= 1");
  }
  return add(bce_against(p_real, smoothing.real_target),
             bce_against(p_fake, smoothing.fake_target));
}

Tensor g_loss(GeneratorObjective kind, const Tensor& p_fake) {
  require_defined(p_fake, "g_loss");
  if (kind == GeneratorObjective::saturating) {
    return mean(clamped_log(sub(Tensor::scalar(1.0), p_fake)));
  }
  return neg(mean(clamped_log(p_fake)));
}

LossPair wgan_losses(const Tensor& s_real, const Tensor& s_fake) {
  require_defined(s_real, "wgan_losses");
  require_defined(s_fake, "wgan_losses");
  LossPair out;
  out.d_loss = sub(mean(s_fake), mean(s_real));
  out.g_loss = neg(mean(s_fake));
  return out;
}

Tensor gradient_penalty(const std::shared_ptr<Graph>& graph,
                        const std::function<Tensor(const Tensor&)>& critic, const Tensor& real,
                        const Tensor& fake, double lambda, Rng& rng) {
  if (!graph) throw std::invalid_argument("gradient_penalty: null graph");
  require_defined(real, "gradient_penalty");
  require_defined(fake, "gradient_penalty");
  require_same_shape(real, fake, "gradient_penalty");
  if (lambda < 0.0) throw std::invalid_argument("gradient_penalty: lambda must be >= 0");

  const int n = real.rows();
  const int d = real.cols();
  std::vector<double> mixed(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  for (int r = 0; r < n; ++r) {
    const double e = rng.uniform01();
    for (int c = 0; c < d; ++c) {
      mixed[static_cast<std::size_t>(r) * static_cast<std::size_t>(d) +
            static_cast<std::size_t>(c)] = e * real.at(r, c) + (1.0 - e) * fake.at(r, c);
    }
  }
  const Tensor x_hat = graph->leaf(Tensor(n, d, mixed));
  const Tensor scores = critic(x_hat);
  if (!scores.defined() || scores.rows() != n || scores.cols() != 1) {
    throw std::invalid_argument("gradient_penalty: critic must return one score per input row");
  }
  const Tensor input_grad = grad(sum(scores), {x_hat}, /*create_graph=*/true)[0];
  const Tensor excess = sub(row_l2_norm(input_grad), Tensor::scalar(1.0));
  return scale(mean(square(excess)), lambda);
}

LossPair lsgan_losses(const Tensor& v_real, const Tensor& v_fake) {
  require_defined(v_real, "lsgan_losses");
  require_defined(v_fake, "lsgan_losses");
  const Tensor one = Tensor::scalar(1.0);
  LossPair out;
  out.d_loss =
      add(scale(mean(square(sub(v_real, one))), 0.5), scale(mean(square(v_fake)), 0.5));
  out.g_loss = scale(mean(square(sub(v_fake, one))), 0.5);
  return out;
}

LossPair hinge_losses(const Tensor& s_real, const Tensor& s_fake) {
  require_defined(s_real, "hinge_losses");
  require_defined(s_fake, "hinge_losses");
  const Tensor one = Tensor::scalar(1.0);
  LossPair out;
  out.d_loss = add(mean(max_with(sub(one, s_real), 0.0)), mean(max_with(add(one, s_fake), 0.0)));
  out.g_loss = neg(mean(s_fake));
  return out;
}

LossPair ebgan_losses(const Tensor& recon_real, const Tensor& recon_fake) {
  require_defined(recon_real, "ebgan_losses");
  require_defined(recon_fake, "ebgan_losses");
  for (const Tensor* t : {&recon_real, &recon_fake}) {
    for (double v : t->values()) {
      if (v < 0.0) throw std::invalid_argument("ebgan_losses: energies must be nonnegative");
    }
  }
  LossPair out;
  out.d_loss = sub(mean(recon_real), mean(recon_fake));
  out.g_loss = mean(recon_fake);
  return out;
}

Tensor infogan_aux_loss(const Tensor& q_logits, const std::vector<int>& codes) {
  require_defined(q_logits, "infogan_aux_loss");
  const int n = q_logits.rows();
  const int k = q_logits.cols();
  if (static_cast<int>(codes.size()) != n) {
    throw std::invalid_argument("infogan_aux_loss: one code per logit row required");
  }
  std::vector<double> mask(static_cast<std::size_t>(n) * static_cast<std::size_t>(k), 0.0);
  for (int r = 0; r < n; ++r) {
    const int c = codes[static_cast<std::size_t>(r)];
    if (c < 0 || c >= k) throw std::invalid_argument("infogan_aux_loss: code out of range");
    mask[static_cast<std::size_t>(r) * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] =
        1.0;
  }
  const Tensor picked = mul(Tensor(n, k, mask), log_softmax(q_logits, 1));
  return neg(scale(sum(picked), 1.0 / n));
}

Tensor pix2pix_g_loss(const Tensor& adv_term, const Tensor& y_hat, const Tensor& y,
                      double lambda_l1) {
  require_defined(adv_term, "pix2pix_g_loss");
  require_defined(y_hat, "pix2pix_g_loss");
  require_defined(y, "pix2pix_g_loss");
  if (!adv_term.is_scalar()) {
    throw std::invalid_argument("pix2pix_g_loss: adversarial term must be a scalar");
  }
  require_same_shape(y_hat, y, "pix2pix_g_loss");
  if (lambda_l1 < 0.0) throw std::invalid_argument("pix2pix_g_loss: lambda_l1 must be >= 0");
  return add(adv_term, scale(mean(abs(sub(y_hat, y))), lambda_l1));
}

Tensor cycle_loss(const Tensor& x, const Tensor& x_rec, const Tensor& y, const Tensor& y_rec) {
  require_defined(x, "cycle_loss");
  require_defined(x_rec, "cycle_loss");
  require_defined(y, "cycle_loss");
  require_defined(y_rec, "cycle_loss");
  require_same_shape(x, x_rec, "cycle_loss");
  require_same_shape(y, y_rec, "cycle_loss");
  return add(mean(abs(sub(x_rec, x))), mean(abs(sub(y_rec, y))));
}

Tensor feature_matching_loss(const Tensor& f_real, const Tensor& f_fake) {
  require_defined(f_real, "feature_matching_loss");
  require_defined(f_fake, "feature_matching_loss");
  if (f_real.cols() != f_fake.cols()) {
    throw std::invalid_argument("feature_matching_loss: feature widths differ: " +
                                f_real.shape_str() + " vs " + f_fake.shape_str());
  }
  const Tensor mean_real = matmul(Tensor::filled(1, f_real.rows(), 1.0 / f_real.rows()), f_real);
  const Tensor mean_fake = matmul(Tensor::filled(1, f_fake.rows(), 1.0 / f_fake.rows()), f_fake);
  return sum(square(sub(mean_real, mean_fake)));
}

}  // namespace ganlab::losses
