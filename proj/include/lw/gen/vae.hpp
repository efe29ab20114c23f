#pragma once

#include <span>
#include <utility>
#include <vector>

#include "lw/num/adam.hpp"
#include "lw/num/mlp.hpp"
#include "lw/num/prng.hpp"
#include "lw/num/tensor.hpp"
#include "lw/world/projection.hpp"

namespace lw::gen {

inline constexpr double kLogVarClampLo = -8.0;
inline constexpr double kLogVarClampHi = 8.0;

// Batched diagonal-Gaussian posterior: mean and log-variance are (n, dz),
// log-variance already clamped to [-8, 8].
struct GaussianPosterior {
  num::Tensor mean;
  num::Tensor log_variance;

  int batch() const { return mean.rows(); }
  int dz() const { return mean.cols(); }
};

// One tradition's generative model: decoder mean network p(x|z), encoder
// network q(z|x) emitting [mean, log_variance], and a fixed Gaussian
// observation noise. enc_input optionally reduces the observable before
// encoding (identity for ordinary models); the decoder always emits the full
// observable width.
struct TraditionModel {
  int dz = 0;
  int dx = 0;
  double obs_sigma = 0.1;
  num::MlpSpec enc_spec;
  num::MlpSpec dec_spec;
  num::ParamSet enc_params;
  num::ParamSet dec_params;
  world::ProjectionSpec enc_input;

  void validate() const;
  std::size_t param_count() const { return enc_params.count() + dec_params.count(); }
  TraditionModel clone(bool requires_grad) const;
};

// default architecture: [in, 64, 64, out], tanh
TraditionModel make_tradition_model(int dz, int dx, double obs_sigma, num::PrngStream& stream,
                                    std::vector<int> hidden = {64, 64},
                                    world::ProjectionSpec enc_input = {});

struct ElboReport {
  double reconstruction = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

GaussianPosterior encode(const TraditionModel& model, const num::Tensor& x);
num::Tensor reparam_sample(const GaussianPosterior& post, const num::Tensor& eps);
num::Tensor decode(const TraditionModel& model, const num::Tensor& z);

// mean over rows of the closed-form KL(q || N(0, I));
// for a single-row posterior this is the row KL itself
double gaussian_kl(const GaussianPosterior& post);
std::vector<double> gaussian_kl_rows(const GaussianPosterior& post);

double gaussian_loglik(std::span<const double> x, std::span<const double> x_mean,
                       double obs_sigma);

// k-sample reparameterized bound, averaged over the batch
ElboReport elbo_estimate(const TraditionModel& model, const num::Tensor& x, int k,
                         num::PrngStream& stream);

struct TrainSchedule {
  int epochs = 200;
  int batch_size = 128;
  num::AdamHyper hyper;
  int k = 1;
  // exponential learning-rate decay: epoch e runs at lr * lr_decay^(e/(epochs-1)),
  // so the final epoch runs at lr * lr_decay
  double lr_decay = 0.1;
};

// Maximizes the bound with Adam; returns the trained model and the
// per-epoch mean negative bound. Deterministic given the stream; throws on
// a non-finite loss.
std::pair<TraditionModel, std::vector<double>> train_vae(const TraditionModel& model,
                                                         const num::Tensor& data,
                                                         const TrainSchedule& schedule,
                                                         num::PrngStream& stream);

// mean per-row bound on held-out rows; k >= 64 recommended for evaluation
double heldout_elbo(const TraditionModel& model, const num::Tensor& data, int k,
                    num::PrngStream& stream);

namespace detail {

struct ElboTerms {
  num::Tensor neg_elbo;  // scalar graph root
  double reconstruction = 0.0;
  double kl = 0.0;
};

// Shared graph builder: one encoder, one or more decoders whose targets are
// column blocks of the full observable. enc_in is the (already projected)
// encoder input.
ElboTerms elbo_graph(const num::ParamSet& enc_params, const num::MlpSpec& enc_spec,
                     const std::vector<const num::ParamSet*>& dec_params,
                     const std::vector<const num::MlpSpec*>& dec_specs,
                     const num::Tensor& enc_in, const std::vector<num::Tensor>& targets,
                     double obs_sigma, int dz, int k, num::PrngStream& stream);

num::Tensor project_rows(const num::Tensor& x, const world::ProjectionSpec& proj);

}  // namespace detail

}  // namespace lw::gen
