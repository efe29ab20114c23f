#include "lw/world/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lw::world {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_dataset(const std::string& path, const WorldSpec& spec,
                   const std::vector<TraditionSamples>& traditions) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_dataset: cannot open " + path);
  os << "# lw-dataset v1 hash=" << spec.hash() << ' ' << spec.canonical_string() << '\n';
  for (const auto& samples : traditions) {
    for (const auto& rec : samples) {
      os << rec.tradition_id << ',' << rec.sample_index;
      for (double v : rec.x) os << ',' << fmt(v);
      for (double v : rec.z_true) os << ',' << fmt(v);
      os << '\n';
    }
  }
  if (!os) throw std::runtime_error("write_dataset: write failed for " + path);
}

DatasetFile read_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_dataset: cannot open " + path);
  std::string header;
  std::getline(is, header);
  if (header.rfind("# lw-dataset v1 ", 0) != 0)
    throw std::runtime_error("read_dataset: unrecognized header");

  DatasetFile file;
  // header fields: hash=... then the canonical spec key=value pairs
  std::istringstream hs(header.substr(2));
  std::string tok;
  hs >> tok >> tok;  // "lw-dataset" "v1"
  std::string rest;
  std::getline(hs, rest);
  for (const auto& kvs : split(rest, ' ')) {
    if (kvs.empty()) continue;
    for (const auto& kv : split(kvs, ';')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      if (key == "hash") file.hash = val;
      else if (key == "config") file.spec.config = config_from_name(val);
      else if (key == "n_traditions") file.spec.n_traditions = std::stoi(val);
      else if (key == "dz_true") file.spec.dz_true = std::stoi(val);
      else if (key == "dx") file.spec.dx = std::stoi(val);
      else if (key == "noise_sigma") file.spec.noise_sigma = std::stod(val);
      else if (key == "seed") file.spec.seed = std::stoull(val);
      else if (key == "gen_hidden") {
        file.spec.gen_hidden.clear();
        for (const auto& h : split(val, ',')) if (!h.empty()) file.spec.gen_hidden.push_back(std::stoi(h));
      } else if (key == "activation") {
        file.spec.gen_activation = val == "relu" ? num::Activation::kRelu : num::Activation::kTanh;
      } else if (key == "capacity") {
        file.spec.capacity_asymmetry.clear();
        for (const auto& c : split(val, ',')) if (!c.empty()) file.spec.capacity_asymmetry.push_back(std::stod(c));
      }
    }
  }
  if (file.hash != file.spec.hash())
    throw std::runtime_error("read_dataset: header hash does not match spec fields");

  file.traditions.assign(static_cast<std::size_t>(file.spec.n_traditions), {});
  const int dx = file.spec.dx, dz = file.spec.dz_true;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (static_cast<int>(fields.size()) != 2 + dx + dz)
      throw std::runtime_error("read_dataset: bad record width");
    SampleRecord rec;
    rec.tradition_id = std::stoi(fields[0]);
    rec.sample_index = std::stoll(fields[1]);
    if (rec.tradition_id < 0 || rec.tradition_id >= file.spec.n_traditions)
      throw std::runtime_error("read_dataset: tradition_id out of range");
    rec.x.reserve(static_cast<std::size_t>(dx));
    for (int i = 0; i < dx; ++i) rec.x.push_back(std::stod(fields[2 + i]));
    rec.z_true.reserve(static_cast<std::size_t>(dz));
    for (int i = 0; i < dz; ++i) rec.z_true.push_back(std::stod(fields[2 + dx + i]));
    file.traditions[static_cast<std::size_t>(rec.tradition_id)].push_back(std::move(rec));
  }
  return file;
}

}  // namespace lw::world
