#pragma once

#include <string>
#include <vector>

#include "lw/num/prng.hpp"

namespace lw::disc {

// Finite-alphabet world: prior over K latent states and one K x M
// conditional table p(x|z) per tradition. Everything downstream is an exact
// sum, in nats.
struct DiscreteWorld {
  std::vector<double> prior;                  // length K
  std::vector<std::vector<double>> channels;  // per tradition, K*M row-major

  int n_latent() const { return static_cast<int>(prior.size()); }
  int n_obs() const;
  int n_traditions() const { return static_cast<int>(channels.size()); }

  // Validates row sums to 1e-12 and renormalizes once; worse violations
  // throw.
  void normalize();
};

// total map from observable symbols to a smaller alphabet
struct DeterministicMap {
  std::vector<int> table;

  int out_symbols() const;
  void validate(int m) const;
};

// Bayes posterior p(z | x_symbol); throws on zero-evidence symbols.
std::vector<double> exact_posterior(const DiscreteWorld& world, int tradition, int x_symbol);

// log sum_z prior(z) p(x|z)
double exact_evidence(const DiscreteWorld& world, int tradition, int x_symbol);

// I(X; Z) in nats
double exact_mi(const DiscreteWorld& world, int tradition);

// I(x; z) - I(f(x); z), >= 0 up to rounding
double dpi_gap(const DiscreteWorld& world, int tradition, const DeterministicMap& f);

// sum_z q(z) [ln p(x|z) + ln prior(z) - ln q(z)] with 0 ln 0 = 0; throws if
// q puts mass where the joint is zero (the bound is -inf there).
double exact_elbo_tabular(const DiscreteWorld& world, int tradition, int x_symbol,
                          const std::vector<double>& q);

// world pushed through f: channel columns merged by output symbol
DiscreteWorld apply_map(const DiscreteWorld& world, const DeterministicMap& f);

// random world with Dirichlet(1)-like rows, for property tests
DiscreteWorld random_discrete_world(int k, int m, int n_traditions, num::PrngStream& stream);

// text table file: prior row, then K x M channel rows per tradition
void write_discrete_world(const std::string& path, const DiscreteWorld& world);
DiscreteWorld read_discrete_world(const std::string& path);

}  // namespace lw::disc
