#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganlab/autodiff.hpp"

namespace ganlab {

struct GradCheckCase {
  std::string name;
  int cases = 0;
  double worst_err = 0.0;  // max over entries of |ad - fd| / (atol/rtol scale)
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  bool all_pass = true;
  double seconds = 0.0;
};

// Checks reverse-mode gradients of every OpKind against central finite
// differences on random inputs: |ad - fd| <= atol + rtol * max(|ad|, |fd|)
// entrywise. Inputs are sampled inside each op's domain and away from kinks.
GradCheckReport gradcheck_ops(int cases_per_op, std::uint64_t seed, double rtol = 1e-5,
                              double atol = 1e-8);

// Same scheme for every loss function, differentiating through scores,
// probabilities, and (for the gradient penalty) network parameters.
GradCheckReport gradcheck_losses(int cases_per_loss, std::uint64_t seed, double rtol = 1e-5,
                                 double atol = 1e-8);

// Gradient-of-gradient check: for a two-layer tanh network D and
// h(theta) = ||d D(x) / d x||^2, compares d h / d theta computed by
// differentiating through the create_graph backward pass against finite
// differences over theta.
bool gradcheck_double_backprop(std::uint64_t seed, double rtol = 1e-4, double atol = 1e-8,
                               double* worst_err = nullptr);

bool allclose(double a, double b, double rtol, double atol);

}  // namespace ganlab
