#include "lw/disc/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lw::disc {

namespace {

constexpr double kRowTolerance = 1e-12;

void normalize_row(std::vector<double>& row, std::size_t offset, std::size_t len,
                   const char* what) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double v = row[offset + i];
    if (v < 0.0) throw std::invalid_argument(std::string(what) + ": negative probability");
    s += v;
  }
  if (std::abs(s - 1.0) > kRowTolerance)
    throw std::invalid_argument(std::string(what) + ": row sum deviates from 1 beyond 1e-12");
  for (std::size_t i = 0; i < len; ++i) row[offset + i] /= s;
}

}  // namespace

int DiscreteWorld::n_obs() const {
  if (channels.empty()) throw std::logic_error("DiscreteWorld: no channels");
  return static_cast<int>(channels[0].size() / prior.size());
}

void DiscreteWorld::normalize() {
  if (prior.empty() || channels.empty())
    throw std::invalid_argument("DiscreteWorld: empty prior or channels");
  normalize_row(prior, 0, prior.size(), "prior");
  const std::size_t k = prior.size();
  for (auto& ch : channels) {
    if (ch.size() % k != 0) throw std::invalid_argument("DiscreteWorld: channel size not K x M");
    const std::size_t m = ch.size() / k;
    for (std::size_t z = 0; z < k; ++z) normalize_row(ch, z * m, m, "channel");
  }
}

int DeterministicMap::out_symbols() const {
  int mx = -1;
  for (int v : table) mx = std::max(mx, v);
  return mx + 1;
}

void DeterministicMap::validate(int m) const {
  if (static_cast<int>(table.size()) != m)
    throw std::invalid_argument("DeterministicMap: table must cover all symbols");
  for (int v : table)
    if (v < 0 || v >= m) throw std::invalid_argument("DeterministicMap: value out of range");
}

std::vector<double> exact_posterior(const DiscreteWorld& world, int tradition, int x_symbol) {
  const int k = world.n_latent(), m = world.n_obs();
  if (tradition < 0 || tradition >= world.n_traditions())
    throw std::invalid_argument("exact_posterior: bad tradition");
  if (x_symbol < 0 || x_symbol >= m) throw std::invalid_argument("exact_posterior: bad symbol");
  const auto& ch = world.channels[static_cast<std::size_t>(tradition)];
  std::vector<double> post(static_cast<std::size_t>(k));
  double evidence = 0.0;
  for (int z = 0; z < k; ++z) {
    post[z] = world.prior[z] * ch[static_cast<std::size_t>(z) * m + x_symbol];
    evidence += post[z];
  }
  if (evidence <= 0.0) throw std::domain_error("exact_posterior: zero-evidence symbol");
  for (auto& v : post) v /= evidence;
  return post;
}

double exact_evidence(const DiscreteWorld& world, int tradition, int x_symbol) {
  const int k = world.n_latent(), m = world.n_obs();
  if (tradition < 0 || tradition >= world.n_traditions())
    throw std::invalid_argument("exact_evidence: bad tradition");
  if (x_symbol < 0 || x_symbol >= m) throw std::invalid_argument("exact_evidence: bad symbol");
  const auto& ch = world.channels[static_cast<std::size_t>(tradition)];
  double p = 0.0;
  for (int z = 0; z < k; ++z) p += world.prior[z] * ch[static_cast<std::size_t>(z) * m + x_symbol];
  return std::log(p);
}

double exact_mi(const DiscreteWorld& world, int tradition) {
  const int k = world.n_latent(), m = world.n_obs();
  const auto& ch = world.channels[static_cast<std::size_t>(tradition)];
  std::vector<double> px(static_cast<std::size_t>(m), 0.0);
  for (int z = 0; z < k; ++z)
    for (int x = 0; x < m; ++x) px[x] += world.prior[z] * ch[static_cast<std::size_t>(z) * m + x];
  double mi = 0.0;
  for (int z = 0; z < k; ++z)
    for (int x = 0; x < m; ++x) {
      const double joint = world.prior[z] * ch[static_cast<std::size_t>(z) * m + x];
      if (joint > 0.0) mi += joint * std::log(joint / (world.prior[z] * px[x]));
    }
  return mi;
}

DiscreteWorld apply_map(const DiscreteWorld& world, const DeterministicMap& f) {
  const int k = world.n_latent(), m = world.n_obs();
  f.validate(m);
  const int mo = f.out_symbols();
  DiscreteWorld out;
  out.prior = world.prior;
  for (const auto& ch : world.channels) {
    std::vector<double> merged(static_cast<std::size_t>(k) * mo, 0.0);
    for (int z = 0; z < k; ++z)
      for (int x = 0; x < m; ++x)
        merged[static_cast<std::size_t>(z) * mo + f.table[x]] +=
            ch[static_cast<std::size_t>(z) * m + x];
    out.channels.push_back(std::move(merged));
  }
  return out;
}

double dpi_gap(const DiscreteWorld& world, int tradition, const DeterministicMap& f) {
  return exact_mi(world, tradition) - exact_mi(apply_map(world, f), tradition);
}

double exact_elbo_tabular(const DiscreteWorld& world, int tradition, int x_symbol,
                          const std::vector<double>& q) {
  const int k = world.n_latent(), m = world.n_obs();
  if (static_cast<int>(q.size()) != k) throw std::invalid_argument("exact_elbo_tabular: bad q size");
  double qs = 0.0;
  for (double v : q) {
    if (v < 0.0) throw std::invalid_argument("exact_elbo_tabular: q has negative mass");
    qs += v;
  }
  if (std::abs(qs - 1.0) > 1e-9) throw std::invalid_argument("exact_elbo_tabular: q does not sum to 1");
  const auto& ch = world.channels[static_cast<std::size_t>(tradition)];
  double elbo = 0.0;
  for (int z = 0; z < k; ++z) {
    if (q[z] == 0.0) continue;  // 0 ln 0 = 0
    const double joint = world.prior[z] * ch[static_cast<std::size_t>(z) * m + x_symbol];
    if (joint <= 0.0)
      throw std::domain_error("exact_elbo_tabular: q puts mass where the joint is zero");
    elbo += q[z] * (std::log(joint) - std::log(q[z]));
  }
  return elbo;
}

DiscreteWorld random_discrete_world(int k, int m, int n_traditions, num::PrngStream& stream) {
  auto dirichlet_row = [&stream](std::size_t len) {
    std::vector<double> row(len);
    double s = 0.0;
    for (auto& v : row) {
      v = -std::log(1.0 - stream.uniform());  // Exp(1) draws normalize to Dirichlet(1)
      s += v;
    }
    for (auto& v : row) v /= s;
    return row;
  };
  DiscreteWorld w;
  w.prior = dirichlet_row(static_cast<std::size_t>(k));
  for (int t = 0; t < n_traditions; ++t) {
    std::vector<double> ch;
    ch.reserve(static_cast<std::size_t>(k) * m);
    for (int z = 0; z < k; ++z) {
      auto row = dirichlet_row(static_cast<std::size_t>(m));
      ch.insert(ch.end(), row.begin(), row.end());
    }
    w.channels.push_back(std::move(ch));
  }
  w.normalize();
  return w;
}

void write_discrete_world(const std::string& path, const DiscreteWorld& world) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_discrete_world: cannot open " + path);
  const int k = world.n_latent(), m = world.n_obs();
  os << "# lw-discrete v1 K=" << k << " M=" << m << " traditions=" << world.n_traditions() << '\n';
  auto put_row = [&os](const double* row, int len) {
    for (int i = 0; i < len; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      os << (i ? " " : "") << buf;
    }
    os << '\n';
  };
  put_row(world.prior.data(), k);
  for (const auto& ch : world.channels)
    for (int z = 0; z < k; ++z) put_row(ch.data() + static_cast<std::size_t>(z) * m, m);
  if (!os) throw std::runtime_error("write_discrete_world: write failed");
}

DiscreteWorld read_discrete_world(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_discrete_world: cannot open " + path);
  std::string header;
  std::getline(is, header);
  int k = 0, m = 0, t = 0;
  if (std::sscanf(header.c_str(), "# lw-discrete v1 K=%d M=%d traditions=%d", &k, &m, &t) != 3)
    throw std::runtime_error("read_discrete_world: unrecognized header");
  DiscreteWorld w;
  w.prior.resize(static_cast<std::size_t>(k));
  for (auto& v : w.prior) is >> v;
  for (int i = 0; i < t; ++i) {
    std::vector<double> ch(static_cast<std::size_t>(k) * m);
    for (auto& v : ch) is >> v;
    w.channels.push_back(std::move(ch));
  }
  if (!is) throw std::runtime_error("read_discrete_world: truncated file");
  w.normalize();
  return w;
}

}  // namespace lw::disc
