#pragma once

#include <cstdint>
#include <string>

#include "crosscount/error.hpp"
#include "crosscount/nn/lstm.hpp"

namespace crosscount::nn {

struct TrainHyper {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 120;
  int batch_size = 15;
  std::uint64_t rng_seed = 0;
  // Optional global gradient-norm clip; 0 disables it.
  double clip_norm = 0.0;

  void validate() const {
    if (!(learning_rate > 0.0)) fail(ErrorKind::InvalidArgument, "learning rate must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) fail(ErrorKind::InvalidArgument, "momentum must lie in [0, 1)");
    if (epochs < 1) fail(ErrorKind::InvalidArgument, "epochs must be >= 1");
    if (batch_size < 1) fail(ErrorKind::InvalidArgument, "batch size must be >= 1");
    if (!(clip_norm >= 0.0)) fail(ErrorKind::InvalidArgument, "clip norm must be >= 0");
  }
};

struct OptimizerState {
  LstmParams velocity;

  static OptimizerState for_params(const LstmParams& p) { return OptimizerState{p.zeros_like()}; }
};

// Classical momentum: v <- momentum * v - lr * grad; params <- params + v.
inline void sgdm_step(LstmParams& params, const LstmParams& grads, OptimizerState& state, const TrainHyper& hyper) {
  if (!params.same_shape(grads) || !params.same_shape(state.velocity)) {
    fail(ErrorKind::Mismatch, "SGDM step with shape-incongruent parameters, gradients or velocity");
  }
  zip_tensors(
      [&](auto& p, auto& vel, const auto& grad) {
        vel = hyper.momentum * vel - hyper.learning_rate * grad;
        p += vel;
      },
      params, state.velocity, grads);
}

}  // namespace crosscount::nn
