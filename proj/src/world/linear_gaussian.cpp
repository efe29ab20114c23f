#include "lw/world/linear_gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "lw/num/linalg.hpp"

namespace lw::world {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// M = W^T W + s^2 I, the dz x dz core of both the posterior and the
// Woodbury route to the marginal
std::vector<double> core_matrix(const LinearGaussianWorld& w) {
  std::vector<double> m(static_cast<std::size_t>(w.dz) * w.dz, 0.0);
  for (int i = 0; i < w.dz; ++i)
    for (int j = 0; j < w.dz; ++j) {
      double acc = 0.0;
      for (int r = 0; r < w.dx; ++r)
        acc += w.w[static_cast<std::size_t>(r) * w.dz + i] *
               w.w[static_cast<std::size_t>(r) * w.dz + j];
      m[static_cast<std::size_t>(i) * w.dz + j] = acc + (i == j ? w.obs_sigma * w.obs_sigma : 0.0);
    }
  return m;
}

}  // namespace

LinearGaussianWorld linear_gaussian_world(int dz, int dx, double w_scale, double obs_sigma,
                                          std::uint64_t seed) {
  if (dz <= 0 || dx <= 0 || dz > dx)
    throw std::invalid_argument("linear_gaussian_world: need 0 < dz <= dx");
  if (!(obs_sigma > 0.0))
    throw std::invalid_argument("linear_gaussian_world: obs_sigma must be positive");
  LinearGaussianWorld w;
  w.dz = dz;
  w.dx = dx;
  w.w_scale = w_scale;
  w.obs_sigma = obs_sigma;
  w.seed = seed;
  num::PrngStream stream(seed, 3000);
  w.w.resize(static_cast<std::size_t>(dx) * dz);
  for (auto& v : w.w) v = w_scale * stream.normal();
  return w;
}

double LinearGaussianWorld::marginal_loglik(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dx)
    throw std::invalid_argument("marginal_loglik: x has wrong width");
  const double s2 = obs_sigma * obs_sigma;
  const auto m = core_matrix(*this);
  const auto ch = num::linalg::cholesky(m, dz);

  // log det(W W^T + s^2 I) = (dx - dz) log s^2 + log det(M)
  const double logdet = (dx - dz) * std::log(s2) + ch.logdet();

  // quad = (x.x - x^T W M^-1 W^T x) / s^2
  std::vector<double> wtx(static_cast<std::size_t>(dz), 0.0);
  double xx = 0.0;
  for (int r = 0; r < dx; ++r) {
    xx += x[r] * x[r];
    for (int j = 0; j < dz; ++j) wtx[j] += w[static_cast<std::size_t>(r) * dz + j] * x[r];
  }
  const auto sol = ch.solve(wtx);
  double corr = 0.0;
  for (int j = 0; j < dz; ++j) corr += wtx[j] * sol[j];
  const double quad = (xx - corr) / s2;

  return -0.5 * (dx * kLog2Pi + logdet + quad);
}

std::vector<double> LinearGaussianWorld::posterior_mean(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dx)
    throw std::invalid_argument("posterior_mean: x has wrong width");
  std::vector<double> wtx(static_cast<std::size_t>(dz), 0.0);
  for (int r = 0; r < dx; ++r)
    for (int j = 0; j < dz; ++j) wtx[j] += w[static_cast<std::size_t>(r) * dz + j] * x[r];
  return num::linalg::cholesky(core_matrix(*this), dz).solve(wtx);
}

std::vector<double> LinearGaussianWorld::posterior_cov() const {
  const double s2 = obs_sigma * obs_sigma;
  const auto ch = num::linalg::cholesky(core_matrix(*this), dz);
  std::vector<double> cov(static_cast<std::size_t>(dz) * dz, 0.0);
  std::vector<double> e(static_cast<std::size_t>(dz), 0.0);
  for (int j = 0; j < dz; ++j) {
    e.assign(e.size(), 0.0);
    e[j] = 1.0;
    const auto col = ch.solve(e);
    for (int i = 0; i < dz; ++i) cov[static_cast<std::size_t>(i) * dz + j] = s2 * col[i];
  }
  return cov;
}

std::pair<num::Tensor, num::Tensor> LinearGaussianWorld::sample(int n,
                                                                num::PrngStream& stream) const {
  std::vector<double> xs(static_cast<std::size_t>(n) * dx);
  std::vector<double> zs(static_cast<std::size_t>(n) * dz);
  for (int i = 0; i < n; ++i) {
    double* z = zs.data() + static_cast<std::size_t>(i) * dz;
    for (int j = 0; j < dz; ++j) z[j] = stream.normal();
    double* x = xs.data() + static_cast<std::size_t>(i) * dx;
    for (int r = 0; r < dx; ++r) {
      double acc = 0.0;
      for (int j = 0; j < dz; ++j) acc += w[static_cast<std::size_t>(r) * dz + j] * z[j];
      x[r] = acc + obs_sigma * stream.normal();
    }
  }
  return {num::Tensor::from_data({n, dx}, std::move(xs)),
          num::Tensor::from_data({n, dz}, std::move(zs))};
}

double marginal_loglik_linear(const LinearGaussianWorld& world, std::span<const double> x) {
  return world.marginal_loglik(x);
}

}  // namespace lw::world
