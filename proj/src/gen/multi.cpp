#include "lw/gen/multi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lw::gen {

std::size_t SharedLatentVae::param_count() const {
  std::size_t n = enc_params.count();
  for (const auto& d : dec_params) n += d.count();
  return n;
}

void SharedLatentVae::validate() const {
  if (dz <= 0 || dx_each <= 0 || n_traditions <= 0)
    throw std::invalid_argument("SharedLatentVae: bad dimensions");
  if (!(obs_sigma > 0.0)) throw std::invalid_argument("SharedLatentVae: obs_sigma must be positive");
  if (enc_spec.in_width() != dx_total() || enc_spec.out_width() != 2 * dz)
    throw std::invalid_argument("SharedLatentVae: encoder widths inconsistent");
  if (dec_specs.size() != static_cast<std::size_t>(n_traditions) ||
      dec_params.size() != static_cast<std::size_t>(n_traditions))
    throw std::invalid_argument("SharedLatentVae: one decoder per tradition required");
  for (const auto& s : dec_specs)
    if (s.in_width() != dz || s.out_width() != dx_each)
      throw std::invalid_argument("SharedLatentVae: decoder widths inconsistent");
}

SharedLatentVae SharedLatentVae::clone(bool requires_grad) const {
  SharedLatentVae m = *this;
  m.enc_params = enc_params.clone(requires_grad);
  for (std::size_t i = 0; i < dec_params.size(); ++i)
    m.dec_params[i] = dec_params[i].clone(requires_grad);
  return m;
}

SharedLatentVae make_shared_latent_vae(int dz, int dx_each, int n_traditions, double obs_sigma,
                                       num::PrngStream& stream, std::vector<int> enc_hidden,
                                       std::vector<int> dec_hidden) {
  SharedLatentVae m;
  m.dz = dz;
  m.dx_each = dx_each;
  m.n_traditions = n_traditions;
  m.obs_sigma = obs_sigma;

  m.enc_spec.layer_widths.push_back(dx_each * n_traditions);
  for (int h : enc_hidden) m.enc_spec.layer_widths.push_back(h);
  m.enc_spec.layer_widths.push_back(2 * dz);
  m.enc_params = num::init_mlp(m.enc_spec, stream);

  for (int i = 0; i < n_traditions; ++i) {
    num::MlpSpec ds;
    ds.layer_widths.push_back(dz);
    for (int h : dec_hidden) ds.layer_widths.push_back(h);
    ds.layer_widths.push_back(dx_each);
    m.dec_specs.push_back(ds);
    m.dec_params.push_back(num::init_mlp(ds, stream));
  }
  m.validate();
  return m;
}

namespace {

std::vector<num::Tensor> split_targets(const num::Tensor& xcat, int n_traditions, int dx_each) {
  const int n = xcat.rows();
  std::vector<num::Tensor> targets;
  for (int t = 0; t < n_traditions; ++t) {
    std::vector<double> block(static_cast<std::size_t>(n) * dx_each);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < dx_each; ++c)
        block[static_cast<std::size_t>(i) * dx_each + c] = xcat.at(i, t * dx_each + c);
    targets.push_back(num::Tensor::from_data({n, dx_each}, std::move(block)));
  }
  return targets;
}

detail::ElboTerms build_terms(const SharedLatentVae& m, const num::Tensor& xcat, int k,
                              num::PrngStream& stream) {
  std::vector<const num::ParamSet*> decs;
  std::vector<const num::MlpSpec*> specs;
  for (std::size_t i = 0; i < m.dec_params.size(); ++i) {
    decs.push_back(&m.dec_params[i]);
    specs.push_back(&m.dec_specs[i]);
  }
  auto targets = split_targets(xcat, m.n_traditions, m.dx_each);
  return detail::elbo_graph(m.enc_params, m.enc_spec, decs, specs, xcat, targets, m.obs_sigma,
                            m.dz, k, stream);
}

}  // namespace

ElboReport multi_elbo_estimate(const SharedLatentVae& model, const num::Tensor& xcat, int k,
                               num::PrngStream& stream) {
  model.validate();
  if (xcat.cols() != model.dx_total())
    throw std::invalid_argument("multi_elbo_estimate: width mismatch");
  SharedLatentVae m = model.clone(false);
  detail::ElboTerms terms = build_terms(m, xcat, k, stream);
  if (!std::isfinite(terms.reconstruction) || !std::isfinite(terms.kl))
    throw std::runtime_error("multi_elbo_estimate: non-finite intermediate values");
  ElboReport r;
  r.reconstruction = terms.reconstruction;
  r.kl = terms.kl;
  r.total = r.reconstruction - r.kl;
  return r;
}

std::pair<SharedLatentVae, std::vector<double>> train_multi(const SharedLatentVae& model,
                                                            const num::Tensor& xcat,
                                                            const TrainSchedule& schedule,
                                                            num::PrngStream& stream) {
  model.validate();
  const int n = xcat.rows();
  const int w = xcat.cols();
  if (w != model.dx_total()) throw std::invalid_argument("train_multi: width mismatch");
  if (schedule.epochs > 0 && n < schedule.batch_size)
    throw std::invalid_argument("train_multi: need at least one full batch");

  SharedLatentVae m = model.clone(true);
  std::vector<double> curve;
  if (schedule.epochs == 0) return {std::move(m), std::move(curve)};

  auto pack = [&m]() {
    num::ParamSet all;
    for (auto& t : m.enc_params.values) all.values.push_back(t);
    for (auto& d : m.dec_params)
      for (auto& t : d.values) all.values.push_back(t);
    return all;
  };
  auto unpack = [&m](num::ParamSet& all) {
    std::size_t idx = 0;
    for (auto& t : m.enc_params.values) t = all.values[idx++];
    for (auto& d : m.dec_params)
      for (auto& t : d.values) t = all.values[idx++];
  };

  num::ParamSet params = pack();
  num::AdamState state = num::AdamState::init_for(params);
  const int batches = n / schedule.batch_size;

  num::AdamHyper hyper = schedule.hyper;
  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    if (schedule.epochs > 1)
      hyper.lr = schedule.hyper.lr *
                 std::pow(schedule.lr_decay, static_cast<double>(epoch) / (schedule.epochs - 1));
    const auto order = stream.permutation(static_cast<std::size_t>(n));
    double epoch_loss = 0.0;
    for (int b = 0; b < batches; ++b) {
      std::vector<double> bd(static_cast<std::size_t>(schedule.batch_size) * w);
      for (int r = 0; r < schedule.batch_size; ++r) {
        const std::size_t src = order[static_cast<std::size_t>(b) * schedule.batch_size + r];
        for (int c = 0; c < w; ++c)
          bd[static_cast<std::size_t>(r) * w + c] = xcat.at(static_cast<int>(src), c);
      }
      num::Tensor batch = num::Tensor::from_data({schedule.batch_size, w}, std::move(bd));
      detail::ElboTerms terms = build_terms(m, batch, schedule.k, stream);
      const double loss = terms.neg_elbo.value();
      if (!std::isfinite(loss))
        throw std::runtime_error("train_multi: diverged (non-finite loss at epoch " +
                                 std::to_string(epoch) + ")");
      epoch_loss += loss;
      num::backward(terms.neg_elbo);
      auto grads = num::collect_grads(params);
      auto [next, st] = num::adam_step(params, grads, state, hyper);
      params = std::move(next);
      state = std::move(st);
      unpack(params);
    }
    curve.push_back(epoch_loss / batches);
  }
  return {std::move(m), std::move(curve)};
}

}  // namespace lw::gen
