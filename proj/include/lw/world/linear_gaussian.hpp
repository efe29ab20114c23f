#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lw/num/prng.hpp"
#include "lw/num/tensor.hpp"

namespace lw::world {

// Factor-analysis oracle: x = W z + eps with z ~ N(0, I), eps ~ N(0, s^2 I).
// Marginal and posterior are closed-form, which makes this world the
// analytic ground truth for training and encoding accuracy.
struct LinearGaussianWorld {
  int dz = 0;
  int dx = 0;
  double w_scale = 1.0;
  double obs_sigma = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> w;  // (dx, dz) row-major

  // exact log N(x; 0, W W^T + s^2 I), computed through the dz x dz system
  double marginal_loglik(std::span<const double> x) const;
  // posterior N(mean, cov): mean = (W^T W + s^2 I)^-1 W^T x, cov = s^2 (W^T W + s^2 I)^-1
  std::vector<double> posterior_mean(std::span<const double> x) const;
  std::vector<double> posterior_cov() const;  // (dz, dz) row-major

  // i.i.d. draws; returns (x rows (n, dx), z rows (n, dz))
  std::pair<num::Tensor, num::Tensor> sample(int n, num::PrngStream& stream) const;
};

LinearGaussianWorld linear_gaussian_world(int dz, int dx, double w_scale, double obs_sigma,
                                          std::uint64_t seed);

double marginal_loglik_linear(const LinearGaussianWorld& world, std::span<const double> x);

}  // namespace lw::world
