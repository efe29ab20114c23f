#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lw/gen/vae.hpp"
#include "lw/num/tensor.hpp"

namespace lw::met {

// Fig-style ELBO regime quadrants over (reconstruction, kl) given calibrated
// reference thresholds; boundaries are inclusive (>= recon_ref, <= kl_ref).
enum class RegimeLabel {
  kPerennialistOptimum,
  kSpiritualRigidity,
  kUniversalistCollapse,
  kDilettantism,
};

std::string regime_name(RegimeLabel label);

struct RegimeThresholds {
  double recon_ref = 0.0;
  double kl_ref = 0.0;
};

RegimeLabel regime_classify(const gen::ElboReport& report, const RegimeThresholds& thresholds);

// mean over rows of KL(q(z|x) || prior); ~0 means the posterior ignores the
// input (collapse)
double posterior_collapse_index(const gen::TraditionModel& model, const num::Tensor& data);

// Affine-probe R^2: fit inferred -> z_true by least squares on the first
// half, score 1 - SSE/SST per dimension on the second half, mean clipped to
// [0, 1]. Invariant under invertible affine maps of the inferred codes.
double latent_recovery_r2(const num::Tensor& inferred_means, const num::Tensor& z_true);

// mean canonical correlation (linear CCA, ridge 1e-6) between two paired
// representation sets (n, d)
double cross_tradition_alignment(const num::Tensor& means_a, const num::Tensor& means_b);

using DecoderFn = std::function<std::vector<double>(const std::vector<double>&)>;

// The manifold is the decoder image over the prior's effective support,
// a fixed [-box, box]^dz region; both the descent and the brute-force
// reference stay inside it.
inline constexpr double kLatentBox = 4.0;

struct OffManifoldSearch {
  int n_starts = 16;  // prior-sample starts, on top of the coarse grid when dz <= 2
  int steps = 500;
  double lr = 0.05;
  double grid_extent = 2.5;
};

// min over starts of min_z ||x - decode(z)||_2 by Adam descent on z with
// numerical gradients; an upper bound on the true distance. Throws if every
// start diverges.
double off_manifold_distance(std::span<const double> x, const DecoderFn& decoder, int dz,
                             const OffManifoldSearch& search = {});

// Brute-force reference for dz <= 2: coarse scan of [lo, hi]^dz at the given
// resolution, then two local refinement stages (x10 each) around the best
// cell.
double off_manifold_distance_grid(std::span<const double> x, const DecoderFn& decoder, int dz,
                                  double lo, double hi, double resolution);

DecoderFn decoder_fn_of(const gen::TraditionModel& model);

// mean squared error per coordinate of decode_j(encode-mean_i(x)) against x
double cross_encoder_reconstruction(const gen::TraditionModel& encoder_model,
                                    const gen::TraditionModel& decoder_model,
                                    const num::Tensor& data_j);

struct AbductiveEntry {
  std::string klass;
  double mean = 0.0;
  double se = 0.0;
  int rank = 0;  // 1 = best
};

struct AbductiveTable {
  std::vector<AbductiveEntry> entries;  // declared class order
  std::string tie_break_rule;

  std::string serialize() const;
  static AbductiveTable deserialize(const std::string& text);
};

// Ranks classes by mean held-out bound (descending), ties broken by the
// declared class order. Budgets must match within +-5 percent of the first
// class.
AbductiveTable abductive_compare(const std::vector<std::string>& class_names,
                                 const std::vector<std::size_t>& param_budgets,
                                 const std::vector<std::vector<double>>& per_seed_elbos);

}  // namespace lw::met
