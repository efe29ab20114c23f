#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lw/num/linalg.hpp"
#include "lw/world/linear_gaussian.hpp"

using namespace lw;
using namespace lw::world;

TEST_CASE("dz=dx=1, W=1, sigma=1: marginal is N(0,2)") {
  LinearGaussianWorld w;
  w.dz = 1;
  w.dx = 1;
  w.obs_sigma = 1.0;
  w.w = {1.0};
  const std::vector<double> x0{0.0};
  const double expect = -0.5 * std::log(4.0 * 3.14159265358979323846);
  CHECK(w.marginal_loglik(x0) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(marginal_loglik_linear(w, x0) == w.marginal_loglik(x0));
  CHECK(w.posterior_mean(x0)[0] == 0.0);
}

TEST_CASE("zero-mean symmetry: density at x equals density at -x") {
  LinearGaussianWorld w = linear_gaussian_world(2, 6, 1.0, 0.3, 77);
  num::PrngStream s(1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(6), nx(6);
    for (int i = 0; i < 6; ++i) {
      x[i] = s.uniform(-2.0, 2.0);
      nx[i] = -x[i];
    }
    CHECK(w.marginal_loglik(x) == doctest::Approx(w.marginal_loglik(nx)).epsilon(1e-14));
  }
}

TEST_CASE("dz=2 dx=8: Woodbury route matches dense covariance assembly") {
  LinearGaussianWorld w = linear_gaussian_world(2, 8, 1.0, 0.1, 99);
  num::PrngStream s(2, 2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(8);
    for (auto& v : x) v = s.uniform(-3.0, 3.0);

    // independent path: assemble C = W W^T + s^2 I in full and solve
    const int dx = 8, dz = 2;
    std::vector<double> c(static_cast<std::size_t>(dx) * dx, 0.0);
    for (int i = 0; i < dx; ++i)
      for (int j = 0; j < dx; ++j) {
        double acc = 0.0;
        for (int k = 0; k < dz; ++k)
          acc += w.w[static_cast<std::size_t>(i) * dz + k] * w.w[static_cast<std::size_t>(j) * dz + k];
        c[static_cast<std::size_t>(i) * dx + j] = acc + (i == j ? w.obs_sigma * w.obs_sigma : 0.0);
      }
    auto ch = num::linalg::cholesky(c, dx);
    auto sol = ch.solve(x);
    double quad = 0.0;
    for (int i = 0; i < dx; ++i) quad += x[i] * sol[i];
    const double dense =
        -0.5 * (dx * std::log(2.0 * 3.14159265358979323846) + ch.logdet() + quad);

    CHECK(w.marginal_loglik(x) == doctest::Approx(dense).epsilon(1e-10));
  }
}

TEST_CASE("posterior covariance equals sigma^2 (W^T W + sigma^2 I)^-1") {
  LinearGaussianWorld w = linear_gaussian_world(2, 5, 0.8, 0.2, 5);
  auto cov = w.posterior_cov();
  // multiply by (W^T W + s^2 I) / s^2 and expect the identity
  const double s2 = w.obs_sigma * w.obs_sigma;
  std::vector<double> m(4, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (int r = 0; r < 5; ++r)
        acc += w.w[static_cast<std::size_t>(r) * 2 + i] * w.w[static_cast<std::size_t>(r) * 2 + j];
      m[static_cast<std::size_t>(i) * 2 + j] = acc + (i == j ? s2 : 0.0);
    }
  auto prod = num::linalg::matmul(cov, m, 2, 2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(prod[static_cast<std::size_t>(i) * 2 + j] ==
            doctest::Approx((i == j ? s2 : 0.0)).epsilon(1e-9));
}

TEST_CASE("Monte Carlo marginal density matches the closed form within 3 SE") {
  LinearGaussianWorld w;
  w.dz = 1;
  w.dx = 1;
  w.obs_sigma = 1.0;
  w.w = {1.0};
  const std::vector<double> x{0.4};
  // p(x) = E_z N(x; w z, s^2) over z ~ N(0,1)
  num::PrngStream s(9, 9);
  const int n = 100000;
  double acc = 0.0, acc2 = 0.0;
  const double norm = 1.0 / std::sqrt(2.0 * 3.14159265358979323846);
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    const double diff = x[0] - z;
    const double pdf = norm * std::exp(-0.5 * diff * diff);
    acc += pdf;
    acc2 += pdf * pdf;
  }
  const double mc = acc / n;
  const double se = std::sqrt((acc2 / n - mc * mc) / n);
  CHECK(std::abs(mc - std::exp(w.marginal_loglik(x))) <= 3.0 * se);
}

TEST_CASE("posterior mean tracks the analytic formula on samples") {
  LinearGaussianWorld w = linear_gaussian_world(2, 8, 1.0, 0.1, 123);
  num::PrngStream s(3, 3);
  auto [xs, zs] = w.sample(200, s);
  // with sigma = 0.1 the posterior concentrates near the true z
  double rms = 0.0;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(8);
    for (int c = 0; c < 8; ++c) x[c] = xs.at(i, c);
    auto pm = w.posterior_mean(x);
    for (int d = 0; d < 2; ++d) {
      const double diff = pm[d] - zs.at(i, d);
      rms += diff * diff;
    }
  }
  rms = std::sqrt(rms / (200 * 2));
  CHECK(rms < 0.2);
}

TEST_CASE("constructor validates dimensions and sigma") {
  CHECK_THROWS(linear_gaussian_world(4, 2, 1.0, 0.1, 0));
  CHECK_THROWS(linear_gaussian_world(1, 2, 1.0, 0.0, 0));
}
