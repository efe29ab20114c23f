#include "lw/gen/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lw::gen {

namespace {

constexpr const char* kMagic = "lw-checkpoint";
constexpr int kVersion = 1;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_spec(std::ostream& os, const char* name, const num::MlpSpec& spec) {
  os << name << ' ' << (spec.activation == num::Activation::kTanh ? "tanh" : "relu");
  for (int w : spec.layer_widths) os << ' ' << w;
  os << '\n';
}

void write_params(std::ostream& os, const char* name, const num::ParamSet& params) {
  os << name << ' ' << params.values.size() << '\n';
  for (const auto& t : params.values) {
    os << "tensor";
    os << ' ' << t.shape().size();
    for (int d : t.shape()) os << ' ' << d;
    os << '\n';
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) os << ' ';
      os << fmt(t.data()[i]);
    }
    os << '\n';
  }
}

num::MlpSpec read_spec(std::istream& is, const char* name) {
  std::string tag, act;
  is >> tag >> act;
  if (tag != name) throw std::runtime_error("checkpoint: expected " + std::string(name));
  num::MlpSpec spec;
  spec.activation = act == "tanh" ? num::Activation::kTanh : num::Activation::kRelu;
  std::string line;
  std::getline(is, line);
  std::istringstream ls(line);
  int w;
  while (ls >> w) spec.layer_widths.push_back(w);
  return spec;
}

num::ParamSet read_params(std::istream& is, const char* name) {
  std::string tag;
  std::size_t count = 0;
  is >> tag >> count;
  if (tag != name) throw std::runtime_error("checkpoint: expected " + std::string(name));
  num::ParamSet params;
  for (std::size_t t = 0; t < count; ++t) {
    std::string tt;
    std::size_t ndim = 0;
    is >> tt >> ndim;
    if (tt != "tensor") throw std::runtime_error("checkpoint: expected tensor");
    std::vector<int> shape(ndim);
    std::size_t sz = 1;
    for (auto& d : shape) {
      is >> d;
      sz *= static_cast<std::size_t>(d);
    }
    std::vector<double> data(sz);
    for (auto& v : data) is >> v;
    params.values.push_back(num::Tensor::from_data(std::move(shape), std::move(data), true));
  }
  return params;
}

}  // namespace

void save_model(const TraditionModel& model, const std::string& path) {
  model.validate();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_model: cannot open " + path);
  os << kMagic << " v" << kVersion << '\n';
  os << "dims " << model.dz << ' ' << model.dx << '\n';
  os << "obs_sigma " << fmt(model.obs_sigma) << '\n';
  os << "enc_input " << static_cast<int>(model.enc_input.kind) << ' ' << model.enc_input.k << ' '
     << model.enc_input.block << ' ' << model.enc_input.seed << '\n';
  write_spec(os, "enc_spec", model.enc_spec);
  write_spec(os, "dec_spec", model.dec_spec);
  write_params(os, "enc_params", model.enc_params);
  write_params(os, "dec_params", model.dec_params);
  if (!os) throw std::runtime_error("save_model: write failed for " + path);
}

TraditionModel load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_model: cannot open " + path);
  std::string magic, version;
  is >> magic >> version;
  if (magic != kMagic || version != "v1")
    throw std::runtime_error("load_model: unrecognized checkpoint header");
  TraditionModel m;
  std::string tag;
  is >> tag >> m.dz >> m.dx;
  if (tag != "dims") throw std::runtime_error("load_model: expected dims");
  is >> tag >> m.obs_sigma;
  if (tag != "obs_sigma") throw std::runtime_error("load_model: expected obs_sigma");
  int kind = 0;
  is >> tag >> kind >> m.enc_input.k >> m.enc_input.block >> m.enc_input.seed;
  if (tag != "enc_input") throw std::runtime_error("load_model: expected enc_input");
  m.enc_input.kind = static_cast<world::ProjectionSpec::Kind>(kind);
  m.enc_spec = read_spec(is, "enc_spec");
  m.dec_spec = read_spec(is, "dec_spec");
  m.enc_params = read_params(is, "enc_params");
  m.dec_params = read_params(is, "dec_params");
  if (!is) throw std::runtime_error("load_model: truncated checkpoint");
  m.validate();
  return m;
}

}  // namespace lw::gen
