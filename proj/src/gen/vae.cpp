#include "lw/gen/vae.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lw::gen {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

void TraditionModel::validate() const {
  if (dz <= 0 || dx <= 0) throw std::invalid_argument("TraditionModel: dz and dx must be positive");
  if (!(obs_sigma > 0.0)) throw std::invalid_argument("TraditionModel: obs_sigma must be positive");
  enc_spec.validate();
  dec_spec.validate();
  if (enc_spec.in_width() != enc_input.output_width(dx))
    throw std::invalid_argument("TraditionModel: encoder input width inconsistent with projection");
  if (enc_spec.out_width() != 2 * dz)
    throw std::invalid_argument("TraditionModel: encoder must emit 2*dz");
  if (dec_spec.in_width() != dz || dec_spec.out_width() != dx)
    throw std::invalid_argument("TraditionModel: decoder must map dz -> dx");
}

TraditionModel TraditionModel::clone(bool requires_grad) const {
  TraditionModel m = *this;
  m.enc_params = enc_params.clone(requires_grad);
  m.dec_params = dec_params.clone(requires_grad);
  return m;
}

TraditionModel make_tradition_model(int dz, int dx, double obs_sigma, num::PrngStream& stream,
                                    std::vector<int> hidden, world::ProjectionSpec enc_input) {
  TraditionModel m;
  m.dz = dz;
  m.dx = dx;
  m.obs_sigma = obs_sigma;
  m.enc_input = enc_input;

  const int enc_in = enc_input.output_width(dx);
  m.enc_spec.layer_widths.push_back(enc_in);
  for (int h : hidden) m.enc_spec.layer_widths.push_back(h);
  m.enc_spec.layer_widths.push_back(2 * dz);

  m.dec_spec.layer_widths.push_back(dz);
  for (int h : hidden) m.dec_spec.layer_widths.push_back(h);
  m.dec_spec.layer_widths.push_back(dx);

  m.enc_params = num::init_mlp(m.enc_spec, stream);
  m.dec_params = num::init_mlp(m.dec_spec, stream);
  m.validate();
  return m;
}

namespace detail {

num::Tensor project_rows(const num::Tensor& x, const world::ProjectionSpec& proj) {
  if (proj.is_identity()) return x;
  const int n = x.rows(), dx = x.cols();
  auto data = world::common_core_project_batch(
      std::span<const double>(x.data(), x.size()), n, dx, proj);
  return num::Tensor::from_data({n, proj.output_width(dx)}, std::move(data), false);
}

ElboTerms elbo_graph(const num::ParamSet& enc_params, const num::MlpSpec& enc_spec,
                     const std::vector<const num::ParamSet*>& dec_params,
                     const std::vector<const num::MlpSpec*>& dec_specs,
                     const num::Tensor& enc_in, const std::vector<num::Tensor>& targets,
                     double obs_sigma, int dz, int k, num::PrngStream& stream) {
  if (k < 1) throw std::invalid_argument("elbo_graph: k must be >= 1");
  const int n = enc_in.rows();

  num::Tensor enc_out = num::mlp_forward(enc_params, enc_spec, enc_in);
  num::Tensor mean = num::slice_cols(enc_out, 0, dz);
  num::Tensor logvar = num::clamp(num::slice_cols(enc_out, dz, dz), kLogVarClampLo, kLogVarClampHi);

  // KL(q || N(0,I)) averaged over batch: 0.5 sum(mean^2 + e^lv - 1 - lv) / n
  num::Tensor kl_arg = num::sub(num::add(num::mul(mean, mean), num::exp(logvar)), logvar);
  num::Tensor kl_term = num::scale(num::sum(num::add_scalar(kl_arg, -1.0)), 0.5 / n);

  // reconstruction: mean over k samples and batch of sum_d log N(x_d; mu_d, sigma^2)
  int dx_total = 0;
  for (const auto* s : dec_specs) dx_total += s->out_width();
  num::Tensor sse_total;
  for (int s = 0; s < k; ++s) {
    num::Tensor eps = num::Tensor::from_data({n, dz}, stream.normals(static_cast<std::size_t>(n) * dz));
    num::Tensor z = num::add(mean, num::mul(num::exp(num::scale(logvar, 0.5)), eps));
    for (std::size_t d = 0; d < dec_params.size(); ++d) {
      num::Tensor xhat = num::mlp_forward(*dec_params[d], *dec_specs[d], z);
      num::Tensor diff = num::sub(targets[d], xhat);
      num::Tensor sse = num::sum(num::mul(diff, diff));
      sse_total = sse_total.defined() ? num::add(sse_total, sse) : sse;
    }
  }
  const double sigma2 = obs_sigma * obs_sigma;
  const double recon_const = -0.5 * dx_total * std::log(kTwoPi * sigma2);
  num::Tensor recon_term = num::add_scalar(
      num::scale(sse_total, -0.5 / (sigma2 * static_cast<double>(k) * n)), recon_const);

  ElboTerms out;
  out.reconstruction = recon_term.value();
  out.kl = kl_term.value();
  out.neg_elbo = num::sub(kl_term, recon_term);
  return out;
}

}  // namespace detail

GaussianPosterior encode(const TraditionModel& model, const num::Tensor& x) {
  model.validate();
  if (x.cols() != model.dx) throw std::invalid_argument("encode: input width mismatch");
  num::Tensor enc_in = detail::project_rows(x, model.enc_input);
  num::Tensor enc_out = num::mlp_forward(model.enc_params, model.enc_spec, enc_in);
  GaussianPosterior post;
  post.mean = num::slice_cols(enc_out, 0, model.dz);
  post.log_variance =
      num::clamp(num::slice_cols(enc_out, model.dz, model.dz), kLogVarClampLo, kLogVarClampHi);
  return post;
}

num::Tensor reparam_sample(const GaussianPosterior& post, const num::Tensor& eps) {
  if (eps.size() != post.mean.size()) throw std::invalid_argument("reparam_sample: eps shape mismatch");
  return num::add(post.mean, num::mul(num::exp(num::scale(post.log_variance, 0.5)), eps));
}

num::Tensor decode(const TraditionModel& model, const num::Tensor& z) {
  if (z.cols() != model.dz) throw std::invalid_argument("decode: latent width mismatch");
  return num::mlp_forward(model.dec_params, model.dec_spec, z);
}

std::vector<double> gaussian_kl_rows(const GaussianPosterior& post) {
  const int n = post.batch(), dz = post.dz();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int d = 0; d < dz; ++d) {
      const double m = post.mean.at(i, d);
      const double lv = post.log_variance.at(i, d);
      acc += 0.5 * (m * m + std::exp(lv) - 1.0 - lv);
    }
    out[i] = acc > 0.0 ? acc : 0.0;
  }
  return out;
}

double gaussian_kl(const GaussianPosterior& post) {
  const auto rows = gaussian_kl_rows(post);
  double acc = 0.0;
  for (double v : rows) acc += v;
  return acc / static_cast<double>(rows.size());
}

double gaussian_loglik(std::span<const double> x, std::span<const double> x_mean,
                       double obs_sigma) {
  if (x.size() != x_mean.size()) throw std::invalid_argument("gaussian_loglik: length mismatch");
  if (!(obs_sigma > 0.0)) throw std::invalid_argument("gaussian_loglik: sigma must be positive");
  const double sigma2 = obs_sigma * obs_sigma;
  double acc = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - x_mean[d];
    acc += diff * diff / sigma2 + std::log(kTwoPi * sigma2);
  }
  return -0.5 * acc;
}

ElboReport elbo_estimate(const TraditionModel& model, const num::Tensor& x, int k,
                         num::PrngStream& stream) {
  model.validate();
  if (k < 1) throw std::invalid_argument("elbo_estimate: k must be >= 1");
  if (x.cols() != model.dx) throw std::invalid_argument("elbo_estimate: input width mismatch");

  // evaluation path: detached parameters, no tape
  TraditionModel m = model.clone(false);
  num::Tensor enc_in = detail::project_rows(x, m.enc_input);
  detail::ElboTerms terms = detail::elbo_graph(m.enc_params, m.enc_spec, {&m.dec_params},
                                               {&m.dec_spec}, enc_in, {x}, m.obs_sigma, m.dz, k,
                                               stream);
  if (!std::isfinite(terms.reconstruction) || !std::isfinite(terms.kl))
    throw std::runtime_error("elbo_estimate: non-finite intermediate values");
  ElboReport r;
  r.reconstruction = terms.reconstruction;
  r.kl = terms.kl;
  r.total = r.reconstruction - r.kl;
  return r;
}

std::pair<TraditionModel, std::vector<double>> train_vae(const TraditionModel& model,
                                                         const num::Tensor& data,
                                                         const TrainSchedule& schedule,
                                                         num::PrngStream& stream) {
  model.validate();
  const int n = data.rows();
  const int dx = data.cols();
  if (dx != model.dx) throw std::invalid_argument("train_vae: data width mismatch");
  if (schedule.epochs > 0 && n < schedule.batch_size)
    throw std::invalid_argument("train_vae: need at least one full batch");

  TraditionModel m = model.clone(true);
  std::vector<double> curve;
  if (schedule.epochs == 0) return {std::move(m), std::move(curve)};

  // one flat parameter list for the optimizer
  auto pack = [&m]() {
    num::ParamSet all;
    for (auto& t : m.enc_params.values) all.values.push_back(t);
    for (auto& t : m.dec_params.values) all.values.push_back(t);
    return all;
  };
  auto unpack = [&m](num::ParamSet& all) {
    const std::size_t ne = m.enc_params.values.size();
    for (std::size_t i = 0; i < ne; ++i) m.enc_params.values[i] = all.values[i];
    for (std::size_t i = ne; i < all.values.size(); ++i)
      m.dec_params.values[i - ne] = all.values[i];
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
      std::vector<double> bd(static_cast<std::size_t>(schedule.batch_size) * dx);
      for (int r = 0; r < schedule.batch_size; ++r) {
        const std::size_t src = order[static_cast<std::size_t>(b) * schedule.batch_size + r];
        for (int c = 0; c < dx; ++c)
          bd[static_cast<std::size_t>(r) * dx + c] = data.at(static_cast<int>(src), c);
      }
      num::Tensor batch = num::Tensor::from_data({schedule.batch_size, dx}, std::move(bd));
      num::Tensor enc_in = detail::project_rows(batch, m.enc_input);
      detail::ElboTerms terms =
          detail::elbo_graph(m.enc_params, m.enc_spec, {&m.dec_params}, {&m.dec_spec}, enc_in,
                             {batch}, m.obs_sigma, m.dz, schedule.k, stream);
      const double loss = terms.neg_elbo.value();
      if (!std::isfinite(loss))
        throw std::runtime_error("train_vae: diverged (non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " + std::to_string(b) + ")");
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

double heldout_elbo(const TraditionModel& model, const num::Tensor& data, int k,
                    num::PrngStream& stream) {
  if (!data.defined() || data.size() == 0) throw std::invalid_argument("heldout_elbo: empty data");
  return elbo_estimate(model, data, k, stream).total;
}

}  // namespace lw::gen
