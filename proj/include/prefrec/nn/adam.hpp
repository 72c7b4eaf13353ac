#pragma once

#include <cstdint>
#include <vector>

#include "prefrec/nn/network.hpp"

namespace prefrec::nn {

/// First/second-moment accumulators shaped like the parameters they track.
struct AdamState {
  struct Moments {
    std::vector<float> mw, vw;
    std::vector<float> mb, vb;
  };
  std::vector<Moments> layers;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void init_like(const NetworkParams& net);
};

/// One bias-corrected Adam update. Non-finite gradients reject the whole
/// step with a NumericError (no clipping). Arithmetic in double, parameters
/// rounded back to float.
void adam_step(NetworkParams& params, const GradientBundle& grads, AdamState& state, double lr);

}  // namespace prefrec::nn
