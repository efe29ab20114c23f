#include "lw/met/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lw/num/linalg.hpp"
#include "lw/num/prng.hpp"

namespace lw::met {

namespace {

constexpr double kCcaRidge = 1e-6;

std::vector<double> column_means(const num::Tensor& m) {
  const int n = m.rows(), d = m.cols();
  std::vector<double> mu(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) mu[j] += m.at(i, j);
  for (auto& v : mu) v /= n;
  return mu;
}

}  // namespace

std::string regime_name(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::kPerennialistOptimum: return "perennialist_optimum";
    case RegimeLabel::kSpiritualRigidity: return "spiritual_rigidity";
    case RegimeLabel::kUniversalistCollapse: return "universalist_collapse";
    case RegimeLabel::kDilettantism: return "dilettantism";
  }
  throw std::logic_error("regime_name: unknown label");
}

RegimeLabel regime_classify(const gen::ElboReport& report, const RegimeThresholds& thresholds) {
  const bool recon_ok = report.reconstruction >= thresholds.recon_ref;
  const bool kl_ok = report.kl <= thresholds.kl_ref;
  if (recon_ok && kl_ok) return RegimeLabel::kPerennialistOptimum;
  if (recon_ok) return RegimeLabel::kSpiritualRigidity;
  if (kl_ok) return RegimeLabel::kUniversalistCollapse;
  return RegimeLabel::kDilettantism;
}

double posterior_collapse_index(const gen::TraditionModel& model, const num::Tensor& data) {
  if (!data.defined() || data.rows() == 0)
    throw std::invalid_argument("posterior_collapse_index: empty data");
  gen::TraditionModel m = model.clone(false);
  return gen::gaussian_kl(gen::encode(m, data));
}

double latent_recovery_r2(const num::Tensor& inferred_means, const num::Tensor& z_true) {
  const int n = inferred_means.rows();
  const int d_inf = inferred_means.cols();
  const int d_true = z_true.cols();
  if (z_true.rows() != n) throw std::invalid_argument("latent_recovery_r2: row mismatch");
  if (n < 4 * (d_inf + 1)) throw std::invalid_argument("latent_recovery_r2: too few rows");

  const int n_fit = n / 2;
  const int n_eval = n - n_fit;
  const int cols = d_inf + 1;

  std::vector<double> design(static_cast<std::size_t>(n_fit) * cols);
  for (int i = 0; i < n_fit; ++i) {
    for (int j = 0; j < d_inf; ++j)
      design[static_cast<std::size_t>(i) * cols + j] = inferred_means.at(i, j);
    design[static_cast<std::size_t>(i) * cols + d_inf] = 1.0;
  }

  double r2_sum = 0.0;
  for (int t = 0; t < d_true; ++t) {
    std::vector<double> target(static_cast<std::size_t>(n_fit));
    for (int i = 0; i < n_fit; ++i) target[i] = z_true.at(i, t);
    const auto coef = num::linalg::lstsq(design, target, n_fit, cols, 1e-9);

    double mean_eval = 0.0;
    for (int i = n_fit; i < n; ++i) mean_eval += z_true.at(i, t);
    mean_eval /= n_eval;

    double sse = 0.0, sst = 0.0;
    for (int i = n_fit; i < n; ++i) {
      double pred = coef[d_inf];
      for (int j = 0; j < d_inf; ++j) pred += coef[j] * inferred_means.at(i, j);
      const double actual = z_true.at(i, t);
      sse += (actual - pred) * (actual - pred);
      sst += (actual - mean_eval) * (actual - mean_eval);
    }
    if (sst <= 1e-12) throw std::runtime_error("latent_recovery_r2: degenerate constant z_true");
    r2_sum += 1.0 - sse / sst;
  }
  const double r2 = r2_sum / d_true;
  return std::min(1.0, std::max(0.0, r2));
}

double cross_tradition_alignment(const num::Tensor& means_a, const num::Tensor& means_b) {
  const int n = means_a.rows();
  const int d = means_a.cols();
  if (means_b.rows() != n || means_b.cols() != d)
    throw std::invalid_argument("cross_tradition_alignment: shape mismatch");
  if (n < 8 * d) throw std::invalid_argument("cross_tradition_alignment: too few rows");

  const auto mu_a = column_means(means_a);
  const auto mu_b = column_means(means_b);

  // standardize columns so the ridge is dimensionless (CCA itself is
  // invariant to per-column scaling)
  std::vector<double> sd_a(static_cast<std::size_t>(d), 0.0);
  std::vector<double> sd_b(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < d; ++p) {
      sd_a[p] += (means_a.at(i, p) - mu_a[p]) * (means_a.at(i, p) - mu_a[p]);
      sd_b[p] += (means_b.at(i, p) - mu_b[p]) * (means_b.at(i, p) - mu_b[p]);
    }
  for (int p = 0; p < d; ++p) {
    sd_a[p] = std::sqrt(sd_a[p] / (n - 1));
    sd_b[p] = std::sqrt(sd_b[p] / (n - 1));
    if (sd_a[p] < 1e-12 || sd_b[p] < 1e-12)
      throw std::runtime_error("cross_tradition_alignment: constant column beyond ridge repair");
  }

  std::vector<double> caa(static_cast<std::size_t>(d) * d, 0.0);
  std::vector<double> cbb(static_cast<std::size_t>(d) * d, 0.0);
  std::vector<double> cab(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < d; ++p) {
      const double ap = (means_a.at(i, p) - mu_a[p]) / sd_a[p];
      const double bp = (means_b.at(i, p) - mu_b[p]) / sd_b[p];
      for (int q = 0; q < d; ++q) {
        caa[static_cast<std::size_t>(p) * d + q] += ap * (means_a.at(i, q) - mu_a[q]) / sd_a[q];
        cbb[static_cast<std::size_t>(p) * d + q] += bp * (means_b.at(i, q) - mu_b[q]) / sd_b[q];
        cab[static_cast<std::size_t>(p) * d + q] += ap * (means_b.at(i, q) - mu_b[q]) / sd_b[q];
      }
    }
  const double inv = 1.0 / (n - 1);
  for (int i = 0; i < d * d; ++i) {
    caa[i] *= inv;
    cbb[i] *= inv;
    cab[i] *= inv;
  }
  for (int i = 0; i < d; ++i) {
    caa[static_cast<std::size_t>(i) * d + i] += kCcaRidge;
    cbb[static_cast<std::size_t>(i) * d + i] += kCcaRidge;
  }

  const auto caa_is = num::linalg::inv_sqrt_sym(caa, d);
  const auto cbb_is = num::linalg::inv_sqrt_sym(cbb, d);
  const auto m = num::linalg::matmul(num::linalg::matmul(caa_is, cab, d, d, d), cbb_is, d, d, d);

  // canonical correlations are the singular values of m
  std::vector<double> mtm(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0.0;
      for (int r = 0; r < d; ++r)
        acc += m[static_cast<std::size_t>(r) * d + i] * m[static_cast<std::size_t>(r) * d + j];
      mtm[static_cast<std::size_t>(i) * d + j] = acc;
    }
  std::vector<double> evals, evecs;
  num::linalg::jacobi_eigh(mtm, d, evals, evecs);

  double mean_corr = 0.0;
  for (double e : evals) mean_corr += std::sqrt(std::max(0.0, e));
  mean_corr /= d;
  return std::min(1.0, std::max(0.0, mean_corr));
}

DecoderFn decoder_fn_of(const gen::TraditionModel& model) {
  num::MlpFn fn(model.dec_params, model.dec_spec);
  return [fn](const std::vector<double>& z) { return fn(z); };
}

namespace {

double residual_norm(std::span<const double> x, const DecoderFn& decoder,
                     const std::vector<double>& z) {
  const auto out = decoder(z);
  if (out.size() != x.size()) throw std::invalid_argument("off_manifold_distance: width mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double diff = x[i] - out[i];
    acc += diff * diff;
  }
  return acc;
}

// Adam descent on z with central-difference gradients; returns the best
// squared residual along the trajectory.
double descend(std::span<const double> x, const DecoderFn& decoder, std::vector<double> z,
               const OffManifoldSearch& search) {
  const int dz = static_cast<int>(z.size());
  const double h = 1e-5;
  std::vector<double> m(z.size(), 0.0), v(z.size(), 0.0), g(z.size(), 0.0);
  double best = residual_norm(x, decoder, z);
  for (int step = 1; step <= search.steps; ++step) {
    for (int d = 0; d < dz; ++d) {
      const double orig = z[d];
      z[d] = orig + h;
      const double fp = residual_norm(x, decoder, z);
      z[d] = orig - h;
      const double fm = residual_norm(x, decoder, z);
      z[d] = orig;
      g[d] = (fp - fm) / (2.0 * h);
    }
    const double bc1 = 1.0 - std::pow(0.9, step);
    const double bc2 = 1.0 - std::pow(0.999, step);
    for (int d = 0; d < dz; ++d) {
      m[d] = 0.9 * m[d] + 0.1 * g[d];
      v[d] = 0.999 * v[d] + 0.001 * g[d] * g[d];
      z[d] -= search.lr * (m[d] / bc1) / (std::sqrt(v[d] / bc2) + 1e-8);
      if (z[d] > kLatentBox) z[d] = kLatentBox;
      if (z[d] < -kLatentBox) z[d] = -kLatentBox;
    }
    const double cur = residual_norm(x, decoder, z);
    if (std::isfinite(cur) && cur < best) best = cur;
  }
  return best;
}

}  // namespace

double off_manifold_distance(std::span<const double> x, const DecoderFn& decoder, int dz,
                             const OffManifoldSearch& search) {
  if (dz <= 0) throw std::invalid_argument("off_manifold_distance: dz must be positive");

  std::vector<std::vector<double>> starts;
  if (dz == 1) {
    for (int i = 0; i < 16; ++i)
      starts.push_back({-search.grid_extent + 2.0 * search.grid_extent * i / 15.0});
  } else if (dz == 2) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        starts.push_back({-search.grid_extent + 2.0 * search.grid_extent * i / 3.0,
                          -search.grid_extent + 2.0 * search.grid_extent * j / 3.0});
  }
  num::PrngStream s(0x0FFD15, 0);
  for (int i = 0; i < search.n_starts; ++i) {
    std::vector<double> z(static_cast<std::size_t>(dz));
    for (auto& val : z) {
      val = s.normal();
      if (val > kLatentBox) val = kLatentBox;
      if (val < -kLatentBox) val = -kLatentBox;
    }
    starts.push_back(std::move(z));
  }

  std::vector<double> results(starts.size(), std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(starts.size()); ++i) {
    results[i] = descend(x, decoder, starts[i], search);
  }

  double best = std::numeric_limits<double>::infinity();
  for (double r : results)
    if (std::isfinite(r) && r < best) best = r;
  if (!std::isfinite(best))
    throw std::runtime_error("off_manifold_distance: search diverged from every start");
  return std::sqrt(best);
}

namespace {

// single scan of [lo0,hi0]x[lo1,hi1] (or interval when dz==1); returns best
// squared residual and its location
std::pair<double, std::vector<double>> grid_scan(std::span<const double> x,
                                                 const DecoderFn& decoder, int dz,
                                                 const std::vector<double>& lo,
                                                 const std::vector<double>& hi, double res) {
  const int steps0 = static_cast<int>(std::floor((hi[0] - lo[0]) / res)) + 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> argbest(static_cast<std::size_t>(dz), 0.0);
  if (dz == 1) {
    std::vector<double> z(1);
    for (int i = 0; i < steps0; ++i) {
      z[0] = lo[0] + i * res;
      const double r = residual_norm(x, decoder, z);
      if (r < best) {
        best = r;
        argbest = z;
      }
    }
  } else {
    const int steps1 = static_cast<int>(std::floor((hi[1] - lo[1]) / res)) + 1;
    std::vector<double> col_best(static_cast<std::size_t>(steps0),
                                 std::numeric_limits<double>::infinity());
    std::vector<double> col_arg(static_cast<std::size_t>(steps0), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < steps0; ++i) {
      std::vector<double> z(2);
      z[0] = lo[0] + i * res;
      double local = std::numeric_limits<double>::infinity();
      double arg1 = lo[1];
      for (int j = 0; j < steps1; ++j) {
        z[1] = lo[1] + j * res;
        const double r = residual_norm(x, decoder, z);
        if (r < local) {
          local = r;
          arg1 = z[1];
        }
      }
      col_best[i] = local;
      col_arg[i] = arg1;
    }
    for (int i = 0; i < steps0; ++i)
      if (col_best[i] < best) {
        best = col_best[i];
        argbest = {lo[0] + i * res, col_arg[i]};
      }
  }
  return {best, argbest};
}

}  // namespace

double off_manifold_distance_grid(std::span<const double> x, const DecoderFn& decoder, int dz,
                                  double lo, double hi, double resolution) {
  if (dz < 1 || dz > 2) throw std::invalid_argument("off_manifold_distance_grid: dz must be 1 or 2");
  std::vector<double> cur_lo(static_cast<std::size_t>(dz), lo);
  std::vector<double> cur_hi(static_cast<std::size_t>(dz), hi);
  double res = resolution;
  double best = std::numeric_limits<double>::infinity();
  for (int stage = 0; stage < 3; ++stage) {
    auto [val, arg] = grid_scan(x, decoder, dz, cur_lo, cur_hi, res);
    best = std::min(best, val);
    for (int d = 0; d < dz; ++d) {
      cur_lo[d] = std::max(lo, arg[d] - 2.0 * res);
      cur_hi[d] = std::min(hi, arg[d] + 2.0 * res);
    }
    res /= 10.0;
  }
  return std::sqrt(best);
}

double cross_encoder_reconstruction(const gen::TraditionModel& encoder_model,
                                    const gen::TraditionModel& decoder_model,
                                    const num::Tensor& data_j) {
  if (encoder_model.dz != decoder_model.dz)
    throw std::invalid_argument("cross_encoder_reconstruction: latent dimension mismatch");
  gen::TraditionModel enc = encoder_model.clone(false);
  gen::TraditionModel dec = decoder_model.clone(false);
  gen::GaussianPosterior post = gen::encode(enc, data_j);
  num::Tensor xhat = gen::decode(dec, post.mean);
  if (xhat.cols() != data_j.cols())
    throw std::invalid_argument("cross_encoder_reconstruction: output width mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < data_j.size(); ++i) {
    const double diff = xhat.data()[i] - data_j.data()[i];
    acc += diff * diff;
  }
  return acc / static_cast<double>(data_j.size());
}

std::string AbductiveTable::serialize() const {
  std::ostringstream os;
  os << "abductive-table v1 " << entries.size() << '\n';
  os << "tie_break " << tie_break_rule << '\n';
  for (const auto& e : entries) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g", e.mean, e.se);
    os << e.klass << ' ' << buf << ' ' << e.rank << '\n';
  }
  return os.str();
}

AbductiveTable AbductiveTable::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string tag, version;
  std::size_t count = 0;
  is >> tag >> version >> count;
  if (tag != "abductive-table" || version != "v1")
    throw std::runtime_error("AbductiveTable: unrecognized header");
  AbductiveTable t;
  is >> tag;
  std::getline(is, t.tie_break_rule);
  if (!t.tie_break_rule.empty() && t.tie_break_rule.front() == ' ')
    t.tie_break_rule.erase(t.tie_break_rule.begin());
  for (std::size_t i = 0; i < count; ++i) {
    AbductiveEntry e;
    is >> e.klass >> e.mean >> e.se >> e.rank;
    t.entries.push_back(std::move(e));
  }
  if (!is) throw std::runtime_error("AbductiveTable: truncated");
  return t;
}

AbductiveTable abductive_compare(const std::vector<std::string>& class_names,
                                 const std::vector<std::size_t>& param_budgets,
                                 const std::vector<std::vector<double>>& per_seed_elbos) {
  const std::size_t n_classes = class_names.size();
  if (param_budgets.size() != n_classes || per_seed_elbos.size() != n_classes)
    throw std::invalid_argument("abductive_compare: inputs disagree on class count");
  if (n_classes == 0) throw std::invalid_argument("abductive_compare: no classes");

  const double ref = static_cast<double>(param_budgets[0]);
  for (std::size_t c = 1; c < n_classes; ++c) {
    const double b = static_cast<double>(param_budgets[c]);
    if (std::abs(b - ref) > 0.05 * ref)
      throw std::invalid_argument("abductive_compare: parameter budgets differ beyond 5 percent (" +
                                  class_names[c] + ")");
  }

  const std::size_t n_seeds = per_seed_elbos[0].size();
  if (n_seeds < 2) throw std::invalid_argument("abductive_compare: need at least 2 seeds");
  for (const auto& col : per_seed_elbos)
    if (col.size() != n_seeds)
      throw std::invalid_argument("abductive_compare: unequal seed counts");

  AbductiveTable table;
  table.tie_break_rule = "class-order";
  for (std::size_t c = 0; c < n_classes; ++c) {
    AbductiveEntry e;
    e.klass = class_names[c];
    double sum = 0.0;
    for (double v : per_seed_elbos[c]) sum += v;
    e.mean = sum / static_cast<double>(n_seeds);
    double ss = 0.0;
    for (double v : per_seed_elbos[c]) ss += (v - e.mean) * (v - e.mean);
    e.se = std::sqrt(ss / static_cast<double>(n_seeds - 1) / static_cast<double>(n_seeds));
    table.entries.push_back(std::move(e));
  }

  // rank by mean descending; stable sort keeps the declared order on ties
  std::vector<std::size_t> idx(n_classes);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&table](std::size_t a, std::size_t b) {
    return table.entries[a].mean > table.entries[b].mean;
  });
  for (std::size_t r = 0; r < n_classes; ++r) table.entries[idx[r]].rank = static_cast<int>(r) + 1;
  return table;
}

}  // namespace lw::met
