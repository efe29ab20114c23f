#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lw/gen/vae.hpp"
#include "lw/num/mlp.hpp"
#include "lw/num/prng.hpp"
#include "lw/world/projection.hpp"

namespace lw::world {

// Generative configurations: E gives every tradition its own latent stream
// and decoder; U forces one shared decoder on one latent; P shares the
// latent across traditions but keeps per-tradition decoders.
enum class Config { E, U, P };

std::string config_name(Config c);
Config config_from_name(const std::string& name);

struct WorldSpec {
  Config config = Config::P;
  int n_traditions = 3;
  int dz_true = 2;
  int dx = 16;
  std::vector<int> gen_hidden = {32};  // hidden widths of the true decoders
  num::Activation gen_activation = num::Activation::kTanh;
  double noise_sigma = 0.05;
  std::vector<double> capacity_asymmetry;  // per-tradition hidden multipliers; empty = all 1
  std::uint64_t seed = 0;

  void validate() const;
  std::string canonical_string() const;
  std::string hash() const;
};

struct World {
  WorldSpec spec;
  std::uint64_t effective_seed = 0;  // spec.seed after separation retries
  std::vector<num::MlpSpec> decoder_specs;
  std::vector<num::ParamSet> true_decoders;  // one entry for U

  int n_decoders() const { return static_cast<int>(true_decoders.size()); }
  num::MlpFn decoder_fn(int tradition) const;
  // minimum pairwise distance between 512-point noiseless manifold samples
  double manifold_separation() const;
};

struct SampleRecord {
  int tradition_id = 0;
  long long sample_index = 0;
  std::vector<double> x;
  std::vector<double> z_true;
};

using TraditionSamples = std::vector<SampleRecord>;

// Builds the true decoders from seed-derived streams and, for multi-decoder
// configs, enforces manifold separation (> 10x noise_sigma between any two
// traditions' 512-point samples) by re-seeding, at most 5 retries.
World make_world(const WorldSpec& spec);

// P: one z per sample_index shared across traditions; E: independent z per
// (tradition, index); U: one z and the shared decoder. Per-coordinate
// Gaussian noise at noise_sigma.
std::vector<TraditionSamples> sample_dataset(const World& world, int n, num::PrngStream& stream);

std::vector<double> syncretic_mix(std::span<const double> x_a, std::span<const double> x_b,
                                  double alpha);

// decode(alpha z_a + (1-alpha) z_b) through one model's decoder; the result
// lies on that decoder's manifold by construction
std::vector<double> latent_interpolate_decode(const gen::TraditionModel& model,
                                              std::span<const double> z_a,
                                              std::span<const double> z_b, double alpha);

// rows of a tradition's samples packed into an (n, dx) tensor
num::Tensor samples_to_tensor(const TraditionSamples& samples);
// z_true rows packed into an (n, dz) tensor
num::Tensor latents_to_tensor(const TraditionSamples& samples);

}  // namespace lw::world
