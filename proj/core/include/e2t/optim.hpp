#pragma once

#include "e2t/rng.hpp"
#include "e2t/tape.hpp"
#include "e2t/tensor.hpp"

namespace e2t {

// Adadelta accumulators, one E[g^2] / E[dx^2] pair per parameter.
struct AdadeltaState {
  double rho = 0.95;
  double epsilon = 1e-6;
  ParamMap sq_grad;   // E[g^2]
  ParamMap sq_delta;  // E[dx^2]
};

// One Adadelta update:
//   E[g^2]  <- rho E[g^2] + (1-rho) g^2
//   dx       = -(sqrt(E[dx^2]+eps) / sqrt(E[g^2]+eps)) g
//   E[dx^2] <- rho E[dx^2] + (1-rho) dx^2
//   x       <- x + dx
// Parameters missing from `grads` are treated as zero-gradient.
void adadelta_step(ParamMap& params, const GradMap& grads, AdadeltaState& state);

// Rescales every row whose Euclidean norm exceeds `limit` back to `limit`.
// Rank-1 tensors (and scalars) are treated as a single row.
Tensor maxnorm_constraint(const Tensor& param, double limit = 3.0);
void apply_maxnorm(ParamMap& params, double limit = 3.0);

// Standalone inverted dropout on a plain tensor. Training mode zeroes entries
// with probability `rate` and scales survivors by 1/(1-rate); eval mode is the
// identity.
enum class DropoutMode { train, eval };
Tensor dropout(const Tensor& t, double rate, DropoutMode mode, Rng& rng);

// Gradient map arithmetic for batch accumulation.
void accumulate_grads(GradMap& into, const GradMap& from);
void scale_grads(GradMap& grads, double c);

}  // namespace e2t
