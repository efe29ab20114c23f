#include "lw/harness/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <stdexcept>

#include "lw/disc/discrete.hpp"
#include "lw/gen/multi.hpp"
#include "lw/gen/vae.hpp"
#include "lw/met/metrics.hpp"
#include "lw/world/world.hpp"

namespace lw::harness {

namespace {

// per-seed stream ids
constexpr std::uint64_t kDataStream = 100;
constexpr std::uint64_t kInitStream = 200;
constexpr std::uint64_t kTrainStream = 300;
constexpr std::uint64_t kEvalStream = 400;
constexpr std::uint64_t kNullStream = 500;

constexpr double kModelObsSigma = 0.1;

struct SeedData {
  world::World world;
  std::vector<world::TraditionSamples> train;
  std::vector<world::TraditionSamples> eval;
};

SeedData make_seed_data(const ExperimentConfig& cfg, std::uint64_t seed,
                        world::Config world_config) {
  world::WorldSpec spec = cfg.world;
  spec.config = world_config;
  spec.seed = cfg.world.seed + seed;
  SeedData sd{world::make_world(spec), {}, {}};
  num::PrngStream data_stream(seed, kDataStream + static_cast<std::uint64_t>(world_config));
  auto all = world::sample_dataset(sd.world, cfg.n_train + cfg.n_eval, data_stream);
  for (auto& samples : all) {
    world::TraditionSamples train(samples.begin(), samples.begin() + cfg.n_train);
    world::TraditionSamples eval(samples.begin() + cfg.n_train, samples.end());
    sd.train.push_back(std::move(train));
    sd.eval.push_back(std::move(eval));
  }
  return sd;
}

gen::TraditionModel train_tradition_model(const ExperimentConfig& cfg, const num::Tensor& data,
                                          std::uint64_t seed, std::uint64_t slot,
                                          std::vector<int> hidden,
                                          world::ProjectionSpec enc_input = {},
                                          const gen::TraditionModel* warm_start = nullptr) {
  num::PrngStream init(seed, kInitStream + slot);
  gen::TraditionModel model =
      warm_start ? warm_start->clone(true)
                 : gen::make_tradition_model(cfg.world.dz_true, data.cols(), kModelObsSigma, init,
                                             std::move(hidden), enc_input);
  num::PrngStream train_stream(seed, kTrainStream + slot);
  auto [trained, curve] = gen::train_vae(model, data, cfg.train, train_stream);
  return trained;
}

num::Tensor stack_rows(const std::vector<num::Tensor>& parts) {
  const int d = parts.front().cols();
  int n = 0;
  for (const auto& p : parts) n += p.rows();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(n) * d);
  for (const auto& p : parts) data.insert(data.end(), p.data_vec().begin(), p.data_vec().end());
  return num::Tensor::from_data({n, d}, std::move(data));
}

// paired rows concatenated across traditions, ordered by sample_index
num::Tensor concat_paired(const std::vector<world::TraditionSamples>& traditions) {
  const int t = static_cast<int>(traditions.size());
  const int n = static_cast<int>(traditions[0].size());
  const int dx = static_cast<int>(traditions[0][0].x.size());
  std::vector<double> data(static_cast<std::size_t>(n) * t * dx);
  for (int i = 0; i < n; ++i)
    for (int tr = 0; tr < t; ++tr)
      for (int c = 0; c < dx; ++c)
        data[(static_cast<std::size_t>(i) * t + tr) * dx + c] = traditions[tr][i].x[c];
  return num::Tensor::from_data({n, t * dx}, std::move(data));
}

int majority_needed(std::size_t n_seeds) {
  return static_cast<int>(std::ceil(thresholds::kSeedMajorityFraction * static_cast<double>(n_seeds)));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile95(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t idx =
      static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size()))) - 1;
  return v[std::min(idx, v.size() - 1)];
}

// smallest hidden width whose parameter count lands within 5% of target
int match_hidden_width(const std::function<std::size_t(int)>& params_for, std::size_t target) {
  int best_h = 1;
  double best_err = std::abs(static_cast<double>(params_for(1)) - static_cast<double>(target));
  for (int h = 2; h <= 2048; ++h) {
    const double err =
        std::abs(static_cast<double>(params_for(h)) - static_cast<double>(target));
    if (err < best_err) {
      best_err = err;
      best_h = h;
    }
    if (params_for(h) > target + target / 5) break;
  }
  if (best_err > 0.05 * static_cast<double>(target))
    throw std::runtime_error("budget matching failed: no width lands within 5 percent");
  return best_h;
}

std::size_t tradition_arch_params(int enc_in, int dz, int dx, const std::vector<int>& hidden) {
  num::MlpSpec enc, dec;
  enc.layer_widths.push_back(enc_in);
  for (int h : hidden) enc.layer_widths.push_back(h);
  enc.layer_widths.push_back(2 * dz);
  dec.layer_widths.push_back(dz);
  for (int h : hidden) dec.layer_widths.push_back(h);
  dec.layer_widths.push_back(dx);
  return enc.param_count() + dec.param_count();
}

// ------------------------------ S1 ------------------------------

std::vector<MetricRow> run_s1_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::string sc = "S1";
  std::vector<MetricRow> rows;
  const int dz = cfg.world.dz_true;
  const int dx = cfg.world.dx;
  const int nt = cfg.world.n_traditions;
  const auto hidden = default_model_hidden();

  // convergence on P and E worlds: independent per-tradition VAEs
  std::vector<gen::TraditionModel> p_models;
  double align_p = 0.0, align_e = 0.0, null95_e = 0.0;
  SeedData p_data = make_seed_data(cfg, seed, world::Config::P);
  SeedData e_data = make_seed_data(cfg, seed, world::Config::E);

  for (int pass = 0; pass < 2; ++pass) {
    const bool is_p = pass == 0;
    const SeedData& sd = is_p ? p_data : e_data;
    std::vector<gen::TraditionModel> models;
    for (int t = 0; t < nt; ++t) {
      const std::uint64_t slot = (is_p ? 0 : 10) + static_cast<std::uint64_t>(t);
      models.push_back(train_tradition_model(cfg, world::samples_to_tensor(sd.train[t]), seed,
                                             slot, hidden));
    }

    std::vector<num::Tensor> means;
    for (int t = 0; t < nt; ++t) {
      gen::TraditionModel detached = models[t].clone(false);
      means.push_back(gen::encode(detached, world::samples_to_tensor(sd.eval[t])).mean);
    }

    double align = 0.0;
    int pairs = 0;
    for (int a = 0; a < nt; ++a)
      for (int b = a + 1; b < nt; ++b) {
        align += met::cross_tradition_alignment(means[a], means[b]);
        ++pairs;
      }
    align /= pairs;

    if (is_p) {
      align_p = align;
      p_models = std::move(models);
    } else {
      align_e = align;
      // permutation null of the same statistic
      num::PrngStream null_stream(seed, kNullStream);
      const int n_perm = 200;
      std::vector<double> null_draws;
      null_draws.reserve(n_perm);
      const int n_rows = means[0].rows();
      for (int p = 0; p < n_perm; ++p) {
        double stat = 0.0;
        int np = 0;
        for (int a = 0; a < nt; ++a)
          for (int b = a + 1; b < nt; ++b) {
            const auto perm = null_stream.permutation(static_cast<std::size_t>(n_rows));
            std::vector<double> shuffled(means[b].data_vec().size());
            for (int i = 0; i < n_rows; ++i)
              for (int d = 0; d < dz; ++d)
                shuffled[static_cast<std::size_t>(i) * dz + d] =
                    means[b].at(static_cast<int>(perm[i]), d);
            num::Tensor sb = num::Tensor::from_data({n_rows, dz}, std::move(shuffled));
            stat += met::cross_tradition_alignment(means[a], sb);
            ++np;
          }
        null_draws.push_back(stat / np);
      }
      null95_e = percentile95(std::move(null_draws));
    }
  }

  rows.push_back({sc, seed, "s1_alignment_p", align_p});
  rows.push_back({sc, seed, "s1_alignment_e", align_e});
  rows.push_back({sc, seed, "s1_null95_e", null95_e});
  rows.push_back({sc, seed, "s1_pass_conv_p", align_p >= thresholds::kS1AlignmentMin ? 1.0 : 0.0});
  rows.push_back({sc, seed, "s1_pass_conv_e", align_e <= null95_e ? 1.0 : 0.0});

  // ---- abduction on the P world, budget-matched classes ----
  const std::size_t budget_e = 3 * tradition_arch_params(dx, dz, dx, hidden);

  const int h_upooled = match_hidden_width(
      [&](int h) { return tradition_arch_params(dx, dz, dx, {h, h}); }, budget_e);
  const int core_k = cfg.core.output_width(dx);
  const int h_ucore = match_hidden_width(
      [&](int h) { return tradition_arch_params(core_k, dz, dx, {h, h}); }, budget_e);

  num::MlpSpec dec_ref;
  dec_ref.layer_widths.push_back(dz);
  for (int h : hidden) dec_ref.layer_widths.push_back(h);
  dec_ref.layer_widths.push_back(dx);
  const std::size_t dec_params = dec_ref.param_count();
  const int h_p = match_hidden_width(
      [&](int h) {
        num::MlpSpec enc;
        enc.layer_widths = {nt * dx, h, h, 2 * dz};
        return enc.param_count() + static_cast<std::size_t>(nt) * dec_params;
      },
      budget_e);

  // class E reuses the per-tradition P-world models
  double elbo_e = 0.0;
  for (int t = 0; t < nt; ++t) {
    num::PrngStream ev(seed, kEvalStream + static_cast<std::uint64_t>(t));
    elbo_e += gen::heldout_elbo(p_models[t], world::samples_to_tensor(p_data.eval[t]),
                                cfg.eval_k, ev);
  }

  // pooled rows across traditions
  num::Tensor pooled_train = stack_rows([&] {
    std::vector<num::Tensor> parts;
    for (int t = 0; t < nt; ++t) parts.push_back(world::samples_to_tensor(p_data.train[t]));
    return parts;
  }());
  num::Tensor pooled_eval = stack_rows([&] {
    std::vector<num::Tensor> parts;
    for (int t = 0; t < nt; ++t) parts.push_back(world::samples_to_tensor(p_data.eval[t]));
    return parts;
  }());

  gen::TraditionModel u_pooled =
      train_tradition_model(cfg, pooled_train, seed, 20, {h_upooled, h_upooled});
  num::PrngStream ev_up(seed, kEvalStream + 20);
  const double elbo_upooled =
      nt * gen::heldout_elbo(u_pooled, pooled_eval, cfg.eval_k, ev_up);

  gen::TraditionModel u_core =
      train_tradition_model(cfg, pooled_train, seed, 21, {h_ucore, h_ucore}, cfg.core);
  num::PrngStream ev_uc(seed, kEvalStream + 21);
  const double elbo_ucore = nt * gen::heldout_elbo(u_core, pooled_eval, cfg.eval_k, ev_uc);

  // class P: shared encoder on the paired concatenation, per-tradition decoders
  num::PrngStream init_p(seed, kInitStream + 30);
  gen::SharedLatentVae p_class =
      gen::make_shared_latent_vae(dz, dx, nt, kModelObsSigma, init_p, {h_p, h_p}, hidden);
  num::PrngStream train_p(seed, kTrainStream + 30);
  auto [p_trained, p_curve] =
      gen::train_multi(p_class, concat_paired(p_data.train), cfg.train, train_p);
  num::PrngStream ev_p(seed, kEvalStream + 30);
  const double elbo_p =
      gen::multi_elbo_estimate(p_trained, concat_paired(p_data.eval), cfg.eval_k, ev_p).total;

  const double dims = static_cast<double>(nt) * dx;
  rows.push_back({sc, seed, "s1_abd_elbo_e", elbo_e / dims});
  rows.push_back({sc, seed, "s1_abd_elbo_upooled", elbo_upooled / dims});
  rows.push_back({sc, seed, "s1_abd_elbo_ucore", elbo_ucore / dims});
  rows.push_back({sc, seed, "s1_abd_elbo_p", elbo_p / dims});
  rows.push_back({sc, seed, "s1_budget_e", static_cast<double>(budget_e)});
  rows.push_back({sc, seed, "s1_budget_upooled",
                  static_cast<double>(tradition_arch_params(dx, dz, dx, {h_upooled, h_upooled}))});
  rows.push_back({sc, seed, "s1_budget_ucore",
                  static_cast<double>(tradition_arch_params(core_k, dz, dx, {h_ucore, h_ucore}))});
  rows.push_back({sc, seed, "s1_budget_p", static_cast<double>(p_trained.param_count())});
  const bool p_first = elbo_p > elbo_e && elbo_p > elbo_upooled && elbo_p > elbo_ucore;
  rows.push_back({sc, seed, "s1_abd_rank_p_first", p_first ? 1.0 : 0.0});
  return rows;
}

// ------------------------------ S2 ------------------------------

std::vector<MetricRow> run_s2_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::string sc = "S2";
  std::vector<MetricRow> rows;
  SeedData sd = make_seed_data(cfg, seed, world::Config::P);
  const int dz = cfg.world.dz_true;

  num::MlpFn g_a = sd.world.decoder_fn(0);
  num::MlpFn g_b = sd.world.decoder_fn(1);
  met::DecoderFn dec_a = [&g_a](const std::vector<double>& z) { return g_a(z); };
  met::DecoderFn dec_b = [&g_b](const std::vector<double>& z) { return g_b(z); };

  // on-manifold residual: distance of real (noisy) data to its own manifold
  std::vector<double> residuals;
  for (int i = 0; i < 6; ++i) {
    residuals.push_back(met::off_manifold_distance(sd.eval[0][i].x, dec_a, dz));
    residuals.push_back(met::off_manifold_distance(sd.eval[1][i].x, dec_b, dz));
  }
  const double residual = median_of(residuals);
  rows.push_back({sc, seed, "s2_residual_median", residual});

  // endpoints from different sample indices so the latent path is a real path
  const auto& xa = sd.eval[0][0].x;
  const auto& xb = sd.eval[1][1].x;
  const auto& za = sd.eval[0][0].z_true;
  const auto& zb = sd.eval[1][1].z_true;

  auto eval_alpha = [&](double alpha, double& da, double& db, double& ctrl) {
    const auto mix = world::syncretic_mix(xa, xb, alpha);
    da = met::off_manifold_distance(mix, dec_a, dz);
    db = met::off_manifold_distance(mix, dec_b, dz);
    std::vector<double> z(za.size());
    for (std::size_t d = 0; d < z.size(); ++d) z[d] = alpha * za[d] + (1.0 - alpha) * zb[d];
    ctrl = met::off_manifold_distance(g_a(z), dec_a, dz);
  };

  for (int a = 0; a <= 10; ++a) {
    double da, db, ctrl;
    eval_alpha(a / 10.0, da, db, ctrl);
    const std::string suffix = "alpha_" + std::to_string(a);
    rows.push_back({sc, seed, "s2_dist_a_" + suffix, da});
    rows.push_back({sc, seed, "s2_dist_b_" + suffix, db});
    rows.push_back({sc, seed, "s2_ctrl_" + suffix, ctrl});
  }

  bool pass = true;
  for (int pct : {25, 50, 75}) {
    double da, db, ctrl;
    eval_alpha(pct / 100.0, da, db, ctrl);
    rows.push_back({sc, seed, "s2_crit_dist_a_" + std::to_string(pct), da});
    rows.push_back({sc, seed, "s2_crit_dist_b_" + std::to_string(pct), db});
    rows.push_back({sc, seed, "s2_crit_ctrl_" + std::to_string(pct), ctrl});
    pass = pass && da >= thresholds::kS2OffManifoldFactor * residual &&
           db >= thresholds::kS2OffManifoldFactor * residual &&
           ctrl <= thresholds::kS2ControlFactor * residual;
  }
  rows.push_back({sc, seed, "s2_pass", pass ? 1.0 : 0.0});
  return rows;
}

// ------------------------------ S3 ------------------------------

std::vector<MetricRow> run_s3_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::string sc = "S3";
  std::vector<MetricRow> rows;
  SeedData sd = make_seed_data(cfg, seed, world::Config::U);
  const auto hidden = default_model_hidden();

  num::Tensor train = world::samples_to_tensor(sd.train[0]);
  num::Tensor eval = world::samples_to_tensor(sd.eval[0]);
  num::Tensor z_eval = world::latents_to_tensor(sd.eval[0]);

  // the common-core model is trained directly on the projected observables
  num::Tensor train_core = gen::detail::project_rows(train, cfg.core);
  num::Tensor eval_core = gen::detail::project_rows(eval, cfg.core);

  gen::TraditionModel full = train_tradition_model(cfg, train, seed, 0, hidden);
  gen::TraditionModel core = train_tradition_model(cfg, train_core, seed, 1, hidden);

  gen::TraditionModel full_d = full.clone(false);
  gen::TraditionModel core_d = core.clone(false);
  const double r2_full = met::latent_recovery_r2(gen::encode(full_d, eval).mean, z_eval);
  const double r2_core = met::latent_recovery_r2(gen::encode(core_d, eval_core).mean, z_eval);
  const double col_full = met::posterior_collapse_index(full, eval);
  const double col_core = met::posterior_collapse_index(core, eval_core);

  num::PrngStream ev1(seed, kEvalStream), ev2(seed, kEvalStream + 1);
  const gen::ElboReport rep_full = gen::elbo_estimate(full, eval, cfg.eval_k, ev1);
  const gen::ElboReport rep_core = gen::elbo_estimate(core, eval_core, cfg.eval_k, ev2);

  rows.push_back({sc, seed, "s3_r2_full", r2_full});
  rows.push_back({sc, seed, "s3_r2_core", r2_core});
  rows.push_back({sc, seed, "s3_collapse_full", col_full});
  rows.push_back({sc, seed, "s3_collapse_core", col_core});
  rows.push_back({sc, seed, "s3_recon_full", rep_full.reconstruction});
  rows.push_back({sc, seed, "s3_kl_full", rep_full.kl});
  rows.push_back({sc, seed, "s3_recon_core", rep_core.reconstruction});
  rows.push_back({sc, seed, "s3_kl_core", rep_core.kl});

  // discrete DPI companion: merging symbols with distinct posteriors
  disc::DiscreteWorld witness;
  witness.prior = {0.5, 0.5};
  witness.channels = {{0.6, 0.1, 0.3, 0.1, 0.6, 0.3}};
  witness.normalize();
  disc::DeterministicMap merge{{0, 0, 1}};
  const double mi_full = disc::exact_mi(witness, 0);
  const double mi_core = disc::exact_mi(disc::apply_map(witness, merge), 0);
  rows.push_back({sc, seed, "s3_dpi_mi_full", mi_full});
  rows.push_back({sc, seed, "s3_dpi_mi_core", mi_core});
  rows.push_back({sc, seed, "s3_dpi_gap_witness", mi_full - mi_core});

  const bool pass = r2_core <= r2_full - thresholds::kS3R2Margin &&
                    col_core <= thresholds::kS3CollapseFactor * col_full;
  rows.push_back({sc, seed, "s3_pass", pass ? 1.0 : 0.0});
  return rows;
}

// ------------------------------ S4 ------------------------------

std::vector<MetricRow> run_s4_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::string sc = "S4";
  std::vector<MetricRow> rows;
  SeedData sd = make_seed_data(cfg, seed, world::Config::P);
  const int nt = cfg.world.n_traditions;
  const auto hidden = default_model_hidden();

  std::vector<gen::TraditionModel> models;
  std::vector<num::Tensor> evals;
  for (int t = 0; t < nt; ++t) {
    models.push_back(train_tradition_model(cfg, world::samples_to_tensor(sd.train[t]), seed,
                                           static_cast<std::uint64_t>(t), hidden));
    evals.push_back(world::samples_to_tensor(sd.eval[t]));
  }

  std::vector<std::vector<double>> xrec(nt, std::vector<double>(nt, 0.0));
  double matched_sum = 0.0, mismatched_sum = 0.0;
  int mismatched_count = 0;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nt; ++j) {
      xrec[i][j] = met::cross_encoder_reconstruction(models[i], models[j], evals[j]);
      rows.push_back({sc, seed, "s4_xrec_" + std::to_string(i) + "_" + std::to_string(j),
                      xrec[i][j]});
      if (i == j) {
        matched_sum += xrec[i][j];
      } else {
        mismatched_sum += xrec[i][j];
        ++mismatched_count;
      }
    }
  rows.push_back({sc, seed, "s4_matched_mean", matched_sum / nt});
  rows.push_back({sc, seed, "s4_mismatched_mean", mismatched_sum / mismatched_count});

  bool pass = true;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nt; ++j)
      if (i != j && xrec[i][j] < thresholds::kS4MismatchFactor * xrec[j][j]) pass = false;
  rows.push_back({sc, seed, "s4_pass", pass ? 1.0 : 0.0});
  return rows;
}

// ------------------------------ S5 ------------------------------

std::vector<MetricRow> run_s5_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::string sc = "S5";
  std::vector<MetricRow> rows;
  SeedData sd = make_seed_data(cfg, seed, world::Config::P);
  const int dz = cfg.world.dz_true;
  const int dx = cfg.world.dx;
  const auto hidden = default_model_hidden();

  num::MlpFn g_a = sd.world.decoder_fn(0);
  num::MlpFn g_b = sd.world.decoder_fn(1);
  met::DecoderFn dec_a = [&g_a](const std::vector<double>& z) { return g_a(z); };
  met::DecoderFn dec_b = [&g_b](const std::vector<double>& z) { return g_b(z); };

  // syncretically mixed dataset at alpha = 0.5 over paired samples
  auto mix_rows = [&](const std::vector<world::TraditionSamples>& src) {
    const int n = static_cast<int>(src[0].size());
    std::vector<double> data(static_cast<std::size_t>(n) * dx);
    for (int i = 0; i < n; ++i) {
      const auto mix = world::syncretic_mix(src[0][i].x, src[1][i].x, 0.5);
      for (int c = 0; c < dx; ++c) data[static_cast<std::size_t>(i) * dx + c] = mix[c];
    }
    return num::Tensor::from_data({n, dx}, std::move(data));
  };
  num::Tensor mixed_train = mix_rows(sd.train);
  num::Tensor mixed_eval = mix_rows(sd.eval);

  gen::TraditionModel genesis = train_tradition_model(cfg, mixed_train, seed, 0, hidden);
  gen::TraditionModel gd = genesis.clone(false);

  // internal coherence: reconstruction of the new tradition's own data
  gen::GaussianPosterior post = gen::encode(gd, mixed_eval);
  num::Tensor rec = gen::decode(gd, post.mean);
  double mse = 0.0;
  for (std::size_t i = 0; i < mixed_eval.size(); ++i) {
    const double diff = rec.data()[i] - mixed_eval.data()[i];
    mse += diff * diff;
  }
  rows.push_back({sc, seed, "s5_recon_rms", std::sqrt(mse / static_cast<double>(mixed_eval.size()))});

  // the new manifold sits away from both parents
  num::PrngStream zs(seed, kEvalStream + 7);
  std::vector<double> dist_a, dist_b;
  for (int i = 0; i < 6; ++i) {
    std::vector<double> z(static_cast<std::size_t>(dz));
    for (auto& v : z) v = zs.normal();
    num::Tensor zt = num::Tensor::from_data({1, dz}, z);
    const auto point = gen::decode(gd, zt).data_vec();
    dist_a.push_back(met::off_manifold_distance(point, dec_a, dz));
    dist_b.push_back(met::off_manifold_distance(point, dec_b, dz));
  }
  rows.push_back({sc, seed, "s5_dist_to_a_median", median_of(dist_a)});
  rows.push_back({sc, seed, "s5_dist_to_b_median", median_of(dist_b)});

  std::vector<double> res_a, res_b;
  for (int i = 0; i < 4; ++i) {
    res_a.push_back(met::off_manifold_distance(sd.eval[0][i].x, dec_a, dz));
    res_b.push_back(met::off_manifold_distance(sd.eval[1][i].x, dec_b, dz));
  }
  rows.push_back({sc, seed, "s5_residual_a", median_of(res_a)});
  rows.push_back({sc, seed, "s5_residual_b", median_of(res_b)});
  return rows;
}

// ------------------------------ S6 ------------------------------

std::vector<MetricRow> run_s6_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::string sc = "S6";
  std::vector<MetricRow> rows;
  const auto hidden = default_model_hidden();

  auto epochs_to = [](const std::vector<double>& curve, double thr) {
    for (std::size_t e = 0; e < curve.size(); ++e)
      if (curve[e] <= thr) return static_cast<double>(e + 1);
    return static_cast<double>(curve.size() + 1);
  };

  for (world::Config wc : {world::Config::P, world::Config::E}) {
    const bool is_p = wc == world::Config::P;
    SeedData sd = make_seed_data(cfg, seed, wc);
    num::Tensor a_train = world::samples_to_tensor(sd.train[0]);
    num::Tensor b_train = world::samples_to_tensor(sd.train[1]);

    const std::uint64_t base = is_p ? 0 : 40;
    gen::TraditionModel model_a = train_tradition_model(cfg, a_train, seed, base + 0, hidden);

    num::PrngStream cold_init(seed, kInitStream + base + 1);
    gen::TraditionModel cold0 = gen::make_tradition_model(cfg.world.dz_true, cfg.world.dx,
                                                          kModelObsSigma, cold_init, hidden);
    num::PrngStream cold_train(seed, kTrainStream + base + 1);
    auto [cold, cold_curve] = gen::train_vae(cold0, b_train, cfg.train, cold_train);

    num::PrngStream warm_train(seed, kTrainStream + base + 2);
    auto [warm, warm_curve] = gen::train_vae(model_a, b_train, cfg.train, warm_train);

    const double thr = cold_curve.back() + 0.5;
    const std::string tag = is_p ? "_p" : "_e";
    rows.push_back({sc, seed, "s6_epochs_warm" + tag, epochs_to(warm_curve, thr)});
    rows.push_back({sc, seed, "s6_epochs_cold" + tag, epochs_to(cold_curve, thr)});
    rows.push_back({sc, seed, "s6_final_warm" + tag, warm_curve.back()});
    rows.push_back({sc, seed, "s6_final_cold" + tag, cold_curve.back()});
  }
  return rows;
}

// ------------------------------ assembly ------------------------------

int count_pass(const std::vector<MetricRow>& rows, const std::string& metric) {
  int n = 0;
  for (const auto& r : rows)
    if (r.metric == metric && r.value >= 0.5) ++n;
  return n;
}

void add_majority_threshold(RunReport& report, const std::string& name, const std::string& metric,
                            std::size_t n_seeds) {
  const int need = majority_needed(n_seeds);
  const int got = count_pass(report.rows, metric);
  ThresholdResult t;
  t.name = name;
  t.pass = got >= need;
  t.detail = std::to_string(got) + "/" + std::to_string(n_seeds) + " seeds (need " +
             std::to_string(need) + ")";
  report.thresholds.push_back(std::move(t));
}

void build_abductive_table(RunReport& report) {
  std::vector<std::string> names{"E", "U-pooled", "U-core", "P"};
  std::vector<std::string> metrics{"s1_abd_elbo_e", "s1_abd_elbo_upooled", "s1_abd_elbo_ucore",
                                   "s1_abd_elbo_p"};
  std::vector<std::string> budget_metrics{"s1_budget_e", "s1_budget_upooled", "s1_budget_ucore",
                                          "s1_budget_p"};
  std::vector<std::vector<double>> elbos(4);
  std::vector<std::size_t> budgets(4, 0);
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < 4; ++c) {
      if (row.metric == metrics[c]) elbos[c].push_back(row.value);
      if (row.metric == budget_metrics[c] && budgets[c] == 0)
        budgets[c] = static_cast<std::size_t>(row.value);
    }
  }
  if (elbos[0].size() < 2) return;  // not enough surviving seeds
  report.abductive_table = met::abductive_compare(names, budgets, elbos).serialize();
}

}  // namespace

std::vector<int> default_model_hidden() { return {64, 64}; }

RunReport run_scenario(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.world.validate();

  RunReport report;
  report.scenario = scenario_name(cfg.scenario);
  report.config_text = serialize_config(cfg);
  report.config_hash = cfg.hash();

  const std::size_t n_seeds = cfg.seeds.size();
  std::vector<std::vector<MetricRow>> per_seed(n_seeds);

#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(n_seeds); ++i) {
    const std::uint64_t seed = cfg.seeds[static_cast<std::size_t>(i)];
    try {
      switch (cfg.scenario) {
        case Scenario::S1: per_seed[i] = run_s1_seed(cfg, seed); break;
        case Scenario::S2: per_seed[i] = run_s2_seed(cfg, seed); break;
        case Scenario::S3: per_seed[i] = run_s3_seed(cfg, seed); break;
        case Scenario::S4: per_seed[i] = run_s4_seed(cfg, seed); break;
        case Scenario::S5: per_seed[i] = run_s5_seed(cfg, seed); break;
        case Scenario::S6: per_seed[i] = run_s6_seed(cfg, seed); break;
      }
    } catch (const std::exception& e) {
#pragma omp critical
      std::cerr << "[" << report.scenario << " seed " << seed << "] failed: " << e.what() << "\n";
      per_seed[i] = {{report.scenario, seed, "seed_error", 1.0}};
    }
  }

  for (auto& rows : per_seed)
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  report.sort_rows();
  report.compute_aggregates();

  switch (cfg.scenario) {
    case Scenario::S1:
      add_majority_threshold(report, "s1_convergence_p", "s1_pass_conv_p", n_seeds);
      add_majority_threshold(report, "s1_convergence_e", "s1_pass_conv_e", n_seeds);
      add_majority_threshold(report, "s1_abduction_p_first", "s1_abd_rank_p_first", n_seeds);
      build_abductive_table(report);
      break;
    case Scenario::S2:
      add_majority_threshold(report, "s2_syncretism", "s2_pass", n_seeds);
      break;
    case Scenario::S3: {
      add_majority_threshold(report, "s3_universalism", "s3_pass", n_seeds);
      bool witness_pass = false;
      for (const auto& r : report.rows)
        if (r.metric == "s3_dpi_gap_witness" && r.value > thresholds::kDpiWitnessMin)
          witness_pass = true;
      report.thresholds.push_back(
          {"s3_dpi_witness", witness_pass, "constructed merge gap > 1e-6"});
      break;
    }
    case Scenario::S4:
      add_majority_threshold(report, "s4_matching", "s4_pass", n_seeds);
      break;
    case Scenario::S5:
    case Scenario::S6:
      break;  // reporting scenarios, no pinned thresholds
  }

  const auto t1 = std::chrono::steady_clock::now();
  report.wall_clock_seconds = std::chrono::duration<double>(t1 - t0).count();
  return report;
}

}  // namespace lw::harness
