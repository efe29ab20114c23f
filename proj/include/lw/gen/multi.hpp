#pragma once

#include <utility>
#include <vector>

#include "lw/gen/vae.hpp"

namespace lw::gen {

// Shared-latent model over paired rows: one encoder reads the concatenated
// observables of all traditions, each tradition keeps its own decoder, and a
// single KL term regularizes the shared posterior. Rows are
// (n, n_traditions * dx_each) with tradition blocks in order.
struct SharedLatentVae {
  int dz = 0;
  int dx_each = 0;
  int n_traditions = 0;
  double obs_sigma = 0.1;
  num::MlpSpec enc_spec;
  num::ParamSet enc_params;
  std::vector<num::MlpSpec> dec_specs;
  std::vector<num::ParamSet> dec_params;

  int dx_total() const { return dx_each * n_traditions; }
  std::size_t param_count() const;
  void validate() const;
  SharedLatentVae clone(bool requires_grad) const;
};

SharedLatentVae make_shared_latent_vae(int dz, int dx_each, int n_traditions, double obs_sigma,
                                       num::PrngStream& stream, std::vector<int> enc_hidden,
                                       std::vector<int> dec_hidden);

// joint bound per paired row, averaged over the batch
ElboReport multi_elbo_estimate(const SharedLatentVae& model, const num::Tensor& xcat, int k,
                               num::PrngStream& stream);

std::pair<SharedLatentVae, std::vector<double>> train_multi(const SharedLatentVae& model,
                                                            const num::Tensor& xcat,
                                                            const TrainSchedule& schedule,
                                                            num::PrngStream& stream);

}  // namespace lw::gen
