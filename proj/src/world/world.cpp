#include "lw/world/world.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lw/util/hash.hpp"

namespace lw::world {

namespace {

// stream ids for the independent world-generation substreams
constexpr std::uint64_t kDecoderStreamBase = 1000;
constexpr std::uint64_t kSeparationStream = 2000;
constexpr std::uint64_t kSeparationPoints = 512;

// True decoders get a deliberately spread initialization: Glorot weights
// with gain, small hidden biases, and a final-layer bias offset that shifts
// each manifold to its own region of observable space.
num::ParamSet init_true_decoder(const num::MlpSpec& spec, num::PrngStream& stream) {
  constexpr double kGain = 1.5;
  num::ParamSet params;
  const int layers = spec.n_layers();
  for (int l = 0; l < layers; ++l) {
    const int fan_in = spec.layer_widths[l];
    const int fan_out = spec.layer_widths[l + 1];
    const double a = kGain * std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
    for (auto& v : w) v = stream.uniform(-a, a);
    params.values.push_back(num::Tensor::from_data({fan_out, fan_in}, std::move(w), false));
    std::vector<double> b(static_cast<std::size_t>(fan_out));
    const double bmax = (l + 1 == layers) ? 1.5 : 0.5;
    for (auto& v : b) v = stream.uniform(-bmax, bmax);
    params.values.push_back(num::Tensor::from_data({fan_out}, std::move(b), false));
  }
  return params;
}

std::uint64_t retry_seed(std::uint64_t seed, int attempt) {
  if (attempt == 0) return seed;
  // distinct deterministic reseed per attempt
  return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt));
}

World build_world_once(const WorldSpec& spec, std::uint64_t effective_seed) {
  World w;
  w.spec = spec;
  w.effective_seed = effective_seed;
  const int n_dec = spec.config == Config::U ? 1 : spec.n_traditions;
  for (int i = 0; i < n_dec; ++i) {
    double mult = 1.0;
    if (!spec.capacity_asymmetry.empty()) mult = spec.capacity_asymmetry[i];
    num::MlpSpec ds;
    ds.activation = spec.gen_activation;
    ds.layer_widths.push_back(spec.dz_true);
    for (int h : spec.gen_hidden) {
      const int scaled = std::max(1, static_cast<int>(std::lround(h * mult)));
      ds.layer_widths.push_back(scaled);
    }
    ds.layer_widths.push_back(spec.dx);
    ds.validate();
    num::PrngStream stream(effective_seed, kDecoderStreamBase + static_cast<std::uint64_t>(i));
    w.decoder_specs.push_back(ds);
    w.true_decoders.push_back(init_true_decoder(ds, stream));
  }
  return w;
}

}  // namespace

std::string config_name(Config c) {
  switch (c) {
    case Config::E: return "E";
    case Config::U: return "U";
    case Config::P: return "P";
  }
  throw std::logic_error("config_name: unknown config");
}

Config config_from_name(const std::string& name) {
  if (name == "E") return Config::E;
  if (name == "U") return Config::U;
  if (name == "P") return Config::P;
  throw std::invalid_argument("unknown world config '" + name + "' (want E, U, or P)");
}

void WorldSpec::validate() const {
  if (n_traditions < 1) throw std::invalid_argument("WorldSpec: n_traditions must be positive");
  if ((config == Config::E || config == Config::P) && n_traditions < 2)
    throw std::invalid_argument("WorldSpec: configs E and P need at least 2 traditions");
  if (dz_true <= 0 || dx <= 0) throw std::invalid_argument("WorldSpec: dimensions must be positive");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("WorldSpec: noise_sigma must be >= 0");
  if (gen_hidden.empty()) throw std::invalid_argument("WorldSpec: need at least one hidden layer");
  for (int h : gen_hidden)
    if (h <= 0) throw std::invalid_argument("WorldSpec: hidden widths must be positive");
  if (!capacity_asymmetry.empty()) {
    if (config == Config::U)
      throw std::invalid_argument("WorldSpec: capacity_asymmetry is invalid for config U");
    if (capacity_asymmetry.size() != static_cast<std::size_t>(n_traditions))
      throw std::invalid_argument("WorldSpec: capacity_asymmetry needs one entry per tradition");
    for (double m : capacity_asymmetry)
      if (!(m > 0.0)) throw std::invalid_argument("WorldSpec: capacity multipliers must be positive");
  }
}

std::string WorldSpec::canonical_string() const {
  std::ostringstream os;
  os << "config=" << config_name(config) << ";n_traditions=" << n_traditions
     << ";dz_true=" << dz_true << ";dx=" << dx << ";gen_hidden=";
  for (std::size_t i = 0; i < gen_hidden.size(); ++i) os << (i ? "," : "") << gen_hidden[i];
  os << ";activation=" << (gen_activation == num::Activation::kTanh ? "tanh" : "relu");
  os << ";noise_sigma=" << noise_sigma << ";capacity=";
  for (std::size_t i = 0; i < capacity_asymmetry.size(); ++i)
    os << (i ? "," : "") << capacity_asymmetry[i];
  os << ";seed=" << seed;
  return os.str();
}

std::string WorldSpec::hash() const { return util::hex64(util::fnv1a64(canonical_string())); }

num::MlpFn World::decoder_fn(int tradition) const {
  const int idx = spec.config == Config::U ? 0 : tradition;
  if (idx < 0 || idx >= n_decoders()) throw std::invalid_argument("decoder_fn: bad tradition id");
  return num::MlpFn(true_decoders[idx], decoder_specs[idx]);
}

double World::manifold_separation() const {
  if (n_decoders() < 2) return std::numeric_limits<double>::infinity();
  const int dz = spec.dz_true, dx = spec.dx;
  std::vector<std::vector<double>> clouds;
  for (int t = 0; t < n_decoders(); ++t) {
    num::PrngStream s(effective_seed, kSeparationStream + static_cast<std::uint64_t>(t));
    num::MlpFn g = decoder_fn(t);
    std::vector<double> cloud(kSeparationPoints * dx);
    std::vector<double> z(dz);
    for (std::size_t p = 0; p < kSeparationPoints; ++p) {
      for (auto& v : z) v = s.normal();
      g.eval(z.data(), cloud.data() + p * dx);
    }
    clouds.push_back(std::move(cloud));
  }
  double min_d2 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n_decoders(); ++a)
    for (int b = a + 1; b < n_decoders(); ++b) {
      for (std::size_t i = 0; i < kSeparationPoints; ++i) {
        const double* pa = clouds[a].data() + i * dx;
        for (std::size_t j = 0; j < kSeparationPoints; ++j) {
          const double* pb = clouds[b].data() + j * dx;
          double d2 = 0.0;
          for (int c = 0; c < dx; ++c) {
            const double diff = pa[c] - pb[c];
            d2 += diff * diff;
          }
          if (d2 < min_d2) min_d2 = d2;
        }
      }
    }
  return std::sqrt(min_d2);
}

World make_world(const WorldSpec& spec) {
  spec.validate();
  const int max_attempts = 6;  // first try + 5 retries
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    World w = build_world_once(spec, retry_seed(spec.seed, attempt));
    if (w.n_decoders() < 2) return w;
    if (w.manifold_separation() > 10.0 * spec.noise_sigma) return w;
  }
  throw std::runtime_error("make_world: manifold separation not achieved after 5 retries");
}

std::vector<TraditionSamples> sample_dataset(const World& world, int n, num::PrngStream& stream) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  const WorldSpec& spec = world.spec;
  const int dz = spec.dz_true, dx = spec.dx;

  std::vector<num::MlpFn> decoders;
  for (int t = 0; t < spec.n_traditions; ++t) decoders.push_back(world.decoder_fn(t));

  std::vector<TraditionSamples> out(static_cast<std::size_t>(spec.n_traditions));
  for (auto& v : out) v.reserve(static_cast<std::size_t>(n));

  std::vector<double> z(dz);
  for (int idx = 0; idx < n; ++idx) {
    if (spec.config != Config::E) {
      for (auto& v : z) v = stream.normal();
    }
    for (int t = 0; t < spec.n_traditions; ++t) {
      if (spec.config == Config::E) {
        for (auto& v : z) v = stream.normal();
      }
      SampleRecord rec;
      rec.tradition_id = t;
      rec.sample_index = idx;
      rec.z_true = z;
      rec.x.resize(static_cast<std::size_t>(dx));
      decoders[t].eval(z.data(), rec.x.data());
      if (spec.noise_sigma > 0.0) {
        for (auto& v : rec.x) v += spec.noise_sigma * stream.normal();
      }
      out[static_cast<std::size_t>(t)].push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<double> syncretic_mix(std::span<const double> x_a, std::span<const double> x_b,
                                  double alpha) {
  if (x_a.size() != x_b.size()) throw std::invalid_argument("syncretic_mix: length mismatch");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("syncretic_mix: alpha must be in [0, 1]");
  std::vector<double> out(x_a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * x_a[i] + (1.0 - alpha) * x_b[i];
  return out;
}

std::vector<double> latent_interpolate_decode(const gen::TraditionModel& model,
                                              std::span<const double> z_a,
                                              std::span<const double> z_b, double alpha) {
  if (z_a.size() != z_b.size())
    throw std::invalid_argument("latent_interpolate_decode: latent length mismatch");
  std::vector<double> z(z_a.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = alpha * z_a[i] + (1.0 - alpha) * z_b[i];
  num::Tensor zt = num::Tensor::from_data({1, static_cast<int>(z.size())}, z);
  num::Tensor x = gen::decode(model.clone(false), zt);
  return x.data_vec();
}

num::Tensor samples_to_tensor(const TraditionSamples& samples) {
  if (samples.empty()) throw std::invalid_argument("samples_to_tensor: empty");
  const int n = static_cast<int>(samples.size());
  const int dx = static_cast<int>(samples[0].x.size());
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(n) * dx);
  for (const auto& s : samples) data.insert(data.end(), s.x.begin(), s.x.end());
  return num::Tensor::from_data({n, dx}, std::move(data));
}

num::Tensor latents_to_tensor(const TraditionSamples& samples) {
  if (samples.empty()) throw std::invalid_argument("latents_to_tensor: empty");
  const int n = static_cast<int>(samples.size());
  const int dz = static_cast<int>(samples[0].z_true.size());
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(n) * dz);
  for (const auto& s : samples) data.insert(data.end(), s.z_true.begin(), s.z_true.end());
  return num::Tensor::from_data({n, dz}, std::move(data));
}

}  // namespace lw::world
