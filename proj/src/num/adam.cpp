#include "lw/num/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace lw::num {

AdamState AdamState::init_for(const ParamSet& params) {
  AdamState st;
  for (const auto& t : params.values) {
    st.m.emplace_back(t.size(), 0.0);
    st.v.emplace_back(t.size(), 0.0);
  }
  return st;
}

GradList collect_grads(const ParamSet& params) {
  GradList out;
  out.reserve(params.values.size());
  for (const auto& t : params.values) {
    if (t.grad().size() != t.size())
      throw std::runtime_error("collect_grads: gradient missing (run backward first)");
    out.push_back(t.grad());
  }
  return out;
}

std::pair<ParamSet, AdamState> adam_step(const ParamSet& params, const GradList& grads,
                                         const AdamState& state, const AdamHyper& hyper) {
  if (grads.size() != params.values.size() || state.m.size() != params.values.size())
    throw std::invalid_argument("adam_step: shape mismatch");

  ParamSet out = params.clone(true);
  AdamState st = state;
  st.step += 1;
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(st.step));

  for (std::size_t t = 0; t < grads.size(); ++t) {
    const auto& g = grads[t];
    if (g.size() != params.values[t].size()) throw std::invalid_argument("adam_step: grad size mismatch");
    auto& m = st.m[t];
    auto& v = st.v[t];
    double* p = out.values[t].data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i])) throw std::runtime_error("adam_step: non-finite gradient entry");
      m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
      v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= hyper.lr * mhat / (std::sqrt(vhat) + hyper.eps);
    }
  }
  return {std::move(out), std::move(st)};
}

}  // namespace lw::num
