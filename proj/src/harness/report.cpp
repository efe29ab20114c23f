#include "lw/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lw::harness {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << content;
  if (!os) throw std::runtime_error("write failed for " + path);
}

// mean over seeds of a metric, in first-seen metric order
std::vector<std::pair<std::string, double>> metric_means(const RunReport& report) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& row : report.rows) {
    if (!acc.count(row.metric)) order.push_back(row.metric);
    auto& a = acc[row.metric];
    a.first += row.value;
    a.second += 1;
  }
  std::vector<std::pair<std::string, double>> out;
  for (const auto& name : order) out.emplace_back(name, acc[name].first / acc[name].second);
  return out;
}

double mean_of(const RunReport& report, const std::string& metric) {
  double s = 0.0;
  int n = 0;
  for (const auto& row : report.rows)
    if (row.metric == metric) {
      s += row.value;
      ++n;
    }
  if (n == 0) throw std::runtime_error("plot export: missing metric " + metric);
  return s / n;
}

std::vector<std::uint64_t> seeds_of(const RunReport& report) {
  std::set<std::uint64_t> s;
  for (const auto& row : report.rows) s.insert(row.seed);
  return {s.begin(), s.end()};
}

double value_of(const RunReport& report, std::uint64_t seed, const std::string& metric) {
  for (const auto& row : report.rows)
    if (row.seed == seed && row.metric == metric) return row.value;
  throw std::runtime_error("plot export: missing metric " + metric + " for seed " +
                           std::to_string(seed));
}

bool has_metric(const RunReport& report, std::uint64_t seed, const std::string& metric) {
  for (const auto& row : report.rows)
    if (row.seed == seed && row.metric == metric) return true;
  return false;
}

}  // namespace

bool RunReport::all_pass() const {
  for (const auto& t : thresholds)
    if (!t.pass) return false;
  return true;
}

void RunReport::sort_rows() {
  std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    if (a.seed != b.seed) return a.seed < b.seed;
    return a.metric < b.metric;
  });
}

void RunReport::compute_aggregates() {
  aggregates.clear();
  std::map<std::string, std::vector<double>> per_metric;
  for (const auto& row : rows) per_metric[row.metric].push_back(row.value);
  for (const auto& [name, values] : per_metric) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    aggregates[name + ".mean"] = mean;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      aggregates[name + ".sd"] = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
  }
}

std::string report_to_json(const RunReport& report) {
  nlohmann::json j;
  j["schema_version"] = report.schema_version;
  j["artifact_version"] = report.artifact_version;
  j["scenario"] = report.scenario;
  j["config_text"] = report.config_text;
  j["config_hash"] = report.config_hash;
  j["wall_clock_seconds"] = report.wall_clock_seconds;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"scenario", row.scenario},
                    {"seed", row.seed},
                    {"metric", row.metric},
                    {"value", row.value}});
  }
  j["rows"] = rows;
  j["aggregates"] = report.aggregates;
  nlohmann::json th = nlohmann::json::array();
  for (const auto& t : report.thresholds)
    th.push_back({{"name", t.name}, {"pass", t.pass}, {"detail", t.detail}});
  j["thresholds"] = th;
  if (!report.abductive_table.empty()) j["abductive_table"] = report.abductive_table;
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RunReport r;
  r.schema_version = j.at("schema_version").get<int>();
  r.artifact_version = j.at("artifact_version").get<std::string>();
  r.scenario = j.at("scenario").get<std::string>();
  r.config_text = j.at("config_text").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  for (const auto& row : j.at("rows")) {
    MetricRow m;
    m.scenario = row.at("scenario").get<std::string>();
    m.seed = row.at("seed").get<std::uint64_t>();
    m.metric = row.at("metric").get<std::string>();
    m.value = row.at("value").get<double>();
    r.rows.push_back(std::move(m));
  }
  if (j.contains("aggregates"))
    r.aggregates = j.at("aggregates").get<std::map<std::string, double>>();
  for (const auto& t : j.at("thresholds")) {
    ThresholdResult th;
    th.name = t.at("name").get<std::string>();
    th.pass = t.at("pass").get<bool>();
    th.detail = t.at("detail").get<std::string>();
    r.thresholds.push_back(std::move(th));
  }
  if (j.contains("abductive_table")) r.abductive_table = j.at("abductive_table").get<std::string>();
  return r;
}

std::string rows_to_csv(const RunReport& report) {
  std::ostringstream os;
  os << "schema_version,scenario,seed,metric,value\n";
  for (const auto& row : report.rows)
    os << report.schema_version << ',' << row.scenario << ',' << row.seed << ',' << row.metric
       << ',' << fmt(row.value) << '\n';
  return os.str();
}

std::string emit_report(const RunReport& report, const std::string& dir, ReportFormat format) {
  std::filesystem::create_directories(dir);
  if (format == ReportFormat::kJson) {
    const std::string path = dir + "/report.json";
    write_file(path, report_to_json(report));
    return path;
  }
  const std::string path = dir + "/metrics.csv";
  write_file(path, rows_to_csv(report));
  return path;
}

std::vector<std::string> plot_data_export(const RunReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  const auto seeds = seeds_of(report);

  auto emit = [&](const std::string& name, const std::string& header,
                  const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    os << "# " << header << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (!std::isfinite(row[i])) throw std::runtime_error("plot export: non-finite value");
        os << (i ? " " : "") << fmt(row[i]);
      }
      os << '\n';
    }
    const std::string path = dir + "/" + name;
    write_file(path, os.str());
    written.push_back(path);
  };

  if (report.scenario == "S2") {
    // alpha vs mean distance to each manifold (the interpolation figure)
    std::vector<std::vector<double>> rows;
    for (int a = 0; a <= 10; ++a) {
      const std::string suffix = "alpha_" + std::to_string(a);
      rows.push_back({a / 10.0, mean_of(report, "s2_dist_a_" + suffix),
                      mean_of(report, "s2_dist_b_" + suffix)});
    }
    emit("s2_interpolation.dat", "alpha dist_to_A dist_to_B", rows);
  } else if (report.scenario == "S3") {
    // reconstruction vs kl scatter (the regime quadrant figure)
    std::vector<std::vector<double>> rows;
    for (auto seed : seeds) {
      if (!has_metric(report, seed, "s3_recon_full")) continue;
      rows.push_back({value_of(report, seed, "s3_recon_full"),
                      value_of(report, seed, "s3_kl_full"), 1.0});
      rows.push_back({value_of(report, seed, "s3_recon_core"),
                      value_of(report, seed, "s3_kl_core"), 0.0});
    }
    emit("s3_regimes.dat", "reconstruction kl is_full_model", rows);
  } else if (report.scenario == "S1") {
    std::vector<std::vector<double>> rows;
    for (auto seed : seeds) {
      if (!has_metric(report, seed, "s1_alignment_p")) continue;
      rows.push_back({static_cast<double>(seed), value_of(report, seed, "s1_alignment_p"),
                      value_of(report, seed, "s1_alignment_e"),
                      value_of(report, seed, "s1_null95_e")});
    }
    emit("s1_alignment.dat", "seed alignment_P alignment_E null95_E", rows);
    std::vector<std::vector<double>> abd;
    for (auto seed : seeds) {
      if (!has_metric(report, seed, "s1_abd_elbo_p")) continue;
      abd.push_back({static_cast<double>(seed), value_of(report, seed, "s1_abd_elbo_e"),
                     value_of(report, seed, "s1_abd_elbo_upooled"),
                     value_of(report, seed, "s1_abd_elbo_ucore"),
                     value_of(report, seed, "s1_abd_elbo_p")});
    }
    emit("s1_abduction.dat", "seed elbo_E elbo_Upooled elbo_Ucore elbo_P", abd);
  } else if (report.scenario == "S4") {
    std::vector<std::vector<double>> rows;
    for (auto seed : seeds) {
      if (!has_metric(report, seed, "s4_matched_mean")) continue;
      rows.push_back({static_cast<double>(seed), value_of(report, seed, "s4_matched_mean"),
                      value_of(report, seed, "s4_mismatched_mean")});
    }
    emit("s4_matching.dat", "seed matched_mse mismatched_mse", rows);
  } else if (report.scenario == "S5") {
    std::vector<std::vector<double>> rows;
    for (auto seed : seeds) {
      if (!has_metric(report, seed, "s5_dist_to_a_median")) continue;
      rows.push_back({static_cast<double>(seed), value_of(report, seed, "s5_dist_to_a_median"),
                      value_of(report, seed, "s5_dist_to_b_median"),
                      value_of(report, seed, "s5_recon_rms")});
    }
    emit("s5_genesis.dat", "seed dist_to_A dist_to_B recon_rms", rows);
  } else if (report.scenario == "S6") {
    std::vector<std::vector<double>> rows;
    for (auto seed : seeds) {
      if (!has_metric(report, seed, "s6_epochs_warm_p")) continue;
      rows.push_back({static_cast<double>(seed), value_of(report, seed, "s6_epochs_warm_p"),
                      value_of(report, seed, "s6_epochs_cold_p"),
                      value_of(report, seed, "s6_epochs_warm_e"),
                      value_of(report, seed, "s6_epochs_cold_e")});
    }
    emit("s6_conversion.dat", "seed warm_P cold_P warm_E cold_E", rows);
  }
  return written;
}

}  // namespace lw::harness
