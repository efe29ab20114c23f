#include "lw/num/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace lw::num {

void MlpSpec::validate() const {
  if (layer_widths.size() < 2) throw std::invalid_argument("MlpSpec: needs at least two widths");
  for (int w : layer_widths)
    if (w <= 0) throw std::invalid_argument("MlpSpec: layer width must be positive");
}

std::size_t MlpSpec::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l) {
    n += static_cast<std::size_t>(layer_widths[l]) * layer_widths[l + 1];
    n += static_cast<std::size_t>(layer_widths[l + 1]);
  }
  return n;
}

ParamSet ParamSet::clone(bool requires_grad) const {
  ParamSet out;
  out.values.reserve(values.size());
  for (const auto& t : values)
    out.values.push_back(Tensor::from_data(t.shape(), t.data_vec(), requires_grad));
  return out;
}

std::size_t ParamSet::count() const {
  std::size_t n = 0;
  for (const auto& t : values) n += t.size();
  return n;
}

void ParamSet::set_requires_grad(bool v) {
  for (auto& t : values) t.set_requires_grad(v);
}

ParamSet init_mlp(const MlpSpec& spec, PrngStream& stream) {
  spec.validate();
  ParamSet params;
  for (int l = 0; l < spec.n_layers(); ++l) {
    const int fan_in = spec.layer_widths[l];
    const int fan_out = spec.layer_widths[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
    for (auto& v : w) v = stream.uniform(-a, a);
    params.values.push_back(Tensor::from_data({fan_out, fan_in}, std::move(w), true));
    params.values.push_back(Tensor::zeros({fan_out}, true));
  }
  return params;
}

Tensor mlp_forward(const ParamSet& params, const MlpSpec& spec, const Tensor& batch) {
  spec.validate();
  if (batch.cols() != spec.in_width()) throw std::invalid_argument("mlp_forward: input width mismatch");
  if (params.values.size() != static_cast<std::size_t>(2 * spec.n_layers()))
    throw std::invalid_argument("mlp_forward: params do not match spec");
  Tensor h = batch;
  for (int l = 0; l < spec.n_layers(); ++l) {
    h = add_rowvec(matmul_nt(h, params.values[2 * l]), params.values[2 * l + 1]);
    if (l + 1 < spec.n_layers()) {
      h = spec.activation == Activation::kTanh ? tanh(h) : relu(h);
    }
  }
  return h;
}

MlpFn::MlpFn(const ParamSet& params, const MlpSpec& spec) : spec_(spec) {
  spec_.validate();
  if (params.values.size() != static_cast<std::size_t>(2 * spec.n_layers()))
    throw std::invalid_argument("MlpFn: params do not match spec");
  for (int l = 0; l < spec_.n_layers(); ++l) {
    weights_.push_back(params.values[2 * l].data_vec());
    biases_.push_back(params.values[2 * l + 1].data_vec());
  }
}

void MlpFn::eval(const double* in, double* out) const {
  std::vector<double> cur(in, in + spec_.in_width());
  std::vector<double> next;
  for (int l = 0; l < spec_.n_layers(); ++l) {
    const int wi = spec_.layer_widths[l];
    const int wo = spec_.layer_widths[l + 1];
    next.assign(static_cast<std::size_t>(wo), 0.0);
    const double* w = weights_[l].data();
    for (int j = 0; j < wo; ++j) {
      const double* wrow = w + static_cast<std::size_t>(j) * wi;
      double acc = 0.0;
      for (int r = 0; r < wi; ++r) acc += cur[r] * wrow[r];
      next[j] = acc + biases_[l][j];
    }
    if (l + 1 < spec_.n_layers()) {
      if (spec_.activation == Activation::kTanh) {
        for (auto& v : next) v = std::tanh(v);
      } else {
        for (auto& v : next) v = v > 0.0 ? v : 0.0;
      }
    }
    cur.swap(next);
  }
  for (int j = 0; j < spec_.out_width(); ++j) out[j] = cur[j];
}

std::vector<double> MlpFn::operator()(const std::vector<double>& in) const {
  if (static_cast<int>(in.size()) != spec_.in_width())
    throw std::invalid_argument("MlpFn: input width mismatch");
  std::vector<double> out(static_cast<std::size_t>(spec_.out_width()));
  eval(in.data(), out.data());
  return out;
}

}  // namespace lw::num
