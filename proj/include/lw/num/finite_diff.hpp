#pragma once

#include <functional>

#include "lw/num/adam.hpp"
#include "lw/num/mlp.hpp"

namespace lw::num {

// Central-difference gradient oracle: (f(p + h e) - f(p - h e)) / 2h per
// coordinate. f must be deterministic; non-finite evaluations throw.
GradList finite_diff_grad(const std::function<double(const ParamSet&)>& f, const ParamSet& params,
                          double h = 1e-5);

}  // namespace lw::num
