#pragma once

#include <cstdint>
#include <vector>

#include "lw/num/mlp.hpp"

namespace lw::num {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t step = 0;

  static AdamState init_for(const ParamSet& params);
};

using GradList = std::vector<std::vector<double>>;

// Gradients of each tensor in params, in order; backward() must have run.
GradList collect_grads(const ParamSet& params);

// Standard Adam with bias correction. Pure: returns updated copies.
// Throws on non-finite gradient entries.
std::pair<ParamSet, AdamState> adam_step(const ParamSet& params, const GradList& grads,
                                         const AdamState& state, const AdamHyper& hyper);

}  // namespace lw::num
