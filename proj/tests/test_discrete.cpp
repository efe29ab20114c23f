#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "lw/disc/discrete.hpp"

using namespace lw;
using namespace lw::disc;

namespace {

DiscreteWorld two_state_world() {
  // K=2 uniform prior; p(x0|z0)=0.9, p(x0|z1)=0.3
  DiscreteWorld w;
  w.prior = {0.5, 0.5};
  w.channels = {{0.9, 0.1, 0.3, 0.7}};
  w.normalize();
  return w;
}

double kl_discrete(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) acc += p[i] * std::log(p[i] / q[i]);
  return acc;
}

}  // namespace

TEST_CASE("posterior: deterministic channel gives a point mass") {
  DiscreteWorld w;
  w.prior = {0.25, 0.25, 0.5};
  w.channels = {{1, 0, 0, 0, 1, 0, 0, 0, 1}};
  w.normalize();
  auto post = exact_posterior(w, 0, 1);
  CHECK(post == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("posterior: constant likelihood returns the prior") {
  DiscreteWorld w;
  w.prior = {0.2, 0.8};
  w.channels = {{0.5, 0.5, 0.5, 0.5}};
  w.normalize();
  auto post = exact_posterior(w, 0, 0);
  CHECK(post[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(post[1] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("posterior: hand Bayes value 0.75 confirmed by brute-force normalization") {
  DiscreteWorld w = two_state_world();
  auto post = exact_posterior(w, 0, 0);
  CHECK(post[0] == doctest::Approx(0.75).epsilon(1e-12));

  // brute force: joint table then normalize
  const double j0 = 0.5 * 0.9, j1 = 0.5 * 0.3;
  CHECK(post[0] == doctest::Approx(j0 / (j0 + j1)).epsilon(1e-15));
}

TEST_CASE("evidence values and normalization") {
  DiscreteWorld w = two_state_world();
  CHECK(exact_evidence(w, 0, 0) == doctest::Approx(std::log(0.6)).epsilon(1e-12));

  // identical channel rows: evidence is that row's entry
  DiscreteWorld u;
  u.prior = {0.5, 0.5};
  u.channels = {{0.2, 0.8, 0.2, 0.8}};
  u.normalize();
  CHECK(exact_evidence(u, 0, 1) == doctest::Approx(std::log(0.8)).epsilon(1e-12));

  // sum over x of exp(evidence) is 1
  double total = 0.0;
  for (int x = 0; x < 2; ++x) total += std::exp(exact_evidence(w, 0, x));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero-evidence symbol throws") {
  DiscreteWorld w;
  w.prior = {1.0, 0.0};
  w.channels = {{1.0, 0.0, 0.0, 1.0}};
  w.normalize();
  CHECK_THROWS(exact_posterior(w, 0, 1));
}

TEST_CASE("mutual information closed forms") {
  // channel independent of z
  DiscreteWorld ind;
  ind.prior = {0.3, 0.7};
  ind.channels = {{0.4, 0.6, 0.4, 0.6}};
  ind.normalize();
  CHECK(exact_mi(ind, 0) == doctest::Approx(0.0).epsilon(1e-12));

  // noiseless copy channel, uniform K=2: ln 2
  DiscreteWorld copy;
  copy.prior = {0.5, 0.5};
  copy.channels = {{1, 0, 0, 1}};
  copy.normalize();
  CHECK(exact_mi(copy, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // binary symmetric channel, flip 0.1: (1 - H2(0.1)) ln 2 nats
  DiscreteWorld bsc;
  bsc.prior = {0.5, 0.5};
  bsc.channels = {{0.9, 0.1, 0.1, 0.9}};
  bsc.normalize();
  const double h2 = -(0.1 * std::log2(0.1) + 0.9 * std::log2(0.9));
  CHECK(exact_mi(bsc, 0) == doctest::Approx((1.0 - h2) * std::log(2.0)).epsilon(1e-9));
  CHECK(exact_mi(bsc, 0) == doctest::Approx(0.36806).epsilon(1e-4));
}

TEST_CASE("dpi gap: constant map destroys everything, bijection nothing") {
  DiscreteWorld w = two_state_world();
  DeterministicMap constant{{0, 0}};
  CHECK(dpi_gap(w, 0, constant) == doctest::Approx(exact_mi(w, 0)).epsilon(1e-12));
  DeterministicMap swap{{1, 0}};
  CHECK(dpi_gap(w, 0, swap) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("dpi gap: merging symbols with distinct posteriors is strictly positive") {
  // x0 and x1 have opposite posteriors; merging them conflates z0 and z1
  DiscreteWorld w;
  w.prior = {0.5, 0.5};
  w.channels = {{0.6, 0.1, 0.3, 0.1, 0.6, 0.3}};
  w.normalize();
  DeterministicMap merge{{0, 0, 1}};
  CHECK(dpi_gap(w, 0, merge) > 1e-6);
}

TEST_CASE("tabular ELBO: tightness at the exact posterior") {
  DiscreteWorld w = two_state_world();
  for (int x = 0; x < 2; ++x) {
    auto post = exact_posterior(w, 0, x);
    CHECK(std::abs(exact_elbo_tabular(w, 0, x, post) - exact_evidence(w, 0, x)) < 1e-12);
  }
}

TEST_CASE("tabular ELBO at the prior: evidence minus KL(prior || posterior)") {
  DiscreteWorld w = two_state_world();
  const int x = 0;
  auto post = exact_posterior(w, 0, x);
  const double elbo = exact_elbo_tabular(w, 0, x, w.prior);
  const double expect = exact_evidence(w, 0, x) - kl_discrete(w.prior, post);
  CHECK(elbo == doctest::Approx(expect).epsilon(1e-12));
  CHECK(elbo < exact_evidence(w, 0, x) - 1e-9);
}

TEST_CASE("tabular ELBO gap equals KL(q || posterior) for random q") {
  num::PrngStream s(70, 0);
  for (int trial = 0; trial < 100; ++trial) {
    DiscreteWorld w = random_discrete_world(2 + static_cast<int>(s.next_below(6)),
                                            2 + static_cast<int>(s.next_below(6)), 1, s);
    const int m = w.n_obs();
    const int x = static_cast<int>(s.next_below(static_cast<std::uint64_t>(m)));
    std::vector<double> q(w.prior.size());
    double qs = 0.0;
    for (auto& v : q) {
      v = -std::log(1.0 - s.uniform());
      qs += v;
    }
    for (auto& v : q) v /= qs;

    const double elbo = exact_elbo_tabular(w, 0, x, q);
    const double ev = exact_evidence(w, 0, x);
    auto post = exact_posterior(w, 0, x);
    CHECK(elbo <= ev + 1e-12);
    CHECK(std::abs((ev - elbo) - kl_discrete(q, post)) < 1e-12);
  }
}

TEST_CASE("tabular ELBO rejects q mass on zero-probability states") {
  DiscreteWorld w;
  w.prior = {0.5, 0.5};
  w.channels = {{1.0, 0.0, 0.0, 1.0}};
  w.normalize();
  CHECK_THROWS(exact_elbo_tabular(w, 0, 0, {0.5, 0.5}));
}

TEST_CASE("mi is invariant under observable relabeling") {
  num::PrngStream s(71, 0);
  for (int trial = 0; trial < 20; ++trial) {
    DiscreteWorld w = random_discrete_world(4, 5, 1, s);
    const double base = exact_mi(w, 0);
    auto perm = s.permutation(5);
    DeterministicMap relabel;
    relabel.table.assign(5, 0);
    for (int x = 0; x < 5; ++x) relabel.table[x] = static_cast<int>(perm[x]);
    CHECK(exact_mi(apply_map(w, relabel), 0) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("mi equals H(Z) - H(Z|X) computed by direct summation") {
  num::PrngStream s(72, 0);
  for (int trial = 0; trial < 20; ++trial) {
    DiscreteWorld w = random_discrete_world(3, 6, 1, s);
    const int k = 3, m = 6;
    const auto& ch = w.channels[0];

    double hz = 0.0;
    for (int z = 0; z < k; ++z)
      if (w.prior[z] > 0) hz -= w.prior[z] * std::log(w.prior[z]);

    std::vector<double> px(m, 0.0);
    for (int z = 0; z < k; ++z)
      for (int x = 0; x < m; ++x) px[x] += w.prior[z] * ch[static_cast<std::size_t>(z) * m + x];
    double hz_given_x = 0.0;
    for (int x = 0; x < m; ++x) {
      if (px[x] <= 0) continue;
      for (int z = 0; z < k; ++z) {
        const double joint = w.prior[z] * ch[static_cast<std::size_t>(z) * m + x];
        if (joint > 0) hz_given_x -= joint * std::log(joint / px[x]);
      }
    }
    CHECK(exact_mi(w, 0) == doctest::Approx(hz - hz_given_x).epsilon(1e-12));
  }
}

TEST_CASE("validation: bad row sums are errors, 1e-13 wobble is renormalized") {
  DiscreteWorld bad;
  bad.prior = {0.6, 0.6};
  bad.channels = {{0.5, 0.5, 0.5, 0.5}};
  CHECK_THROWS(bad.normalize());

  DiscreteWorld ok;
  ok.prior = {0.5 + 5e-14, 0.5};
  ok.channels = {{0.5, 0.5, 0.5, 0.5}};
  ok.normalize();
  CHECK(ok.prior[0] + ok.prior[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("discrete world file round trip") {
  num::PrngStream s(73, 0);
  DiscreteWorld w = random_discrete_world(3, 4, 2, s);
  const std::string path = "discrete_roundtrip_test.txt";
  write_discrete_world(path, w);
  DiscreteWorld r = read_discrete_world(path);
  // load renormalizes rows once, which may perturb the last bit
  REQUIRE(r.prior.size() == w.prior.size());
  for (std::size_t i = 0; i < w.prior.size(); ++i)
    CHECK(r.prior[i] == doctest::Approx(w.prior[i]).epsilon(1e-15));
  REQUIRE(r.channels.size() == w.channels.size());
  for (std::size_t t = 0; t < w.channels.size(); ++t) {
    REQUIRE(r.channels[t].size() == w.channels[t].size());
    for (std::size_t i = 0; i < w.channels[t].size(); ++i)
      CHECK(r.channels[t][i] == doctest::Approx(w.channels[t][i]).epsilon(1e-15));
  }
  std::remove(path.c_str());
}
