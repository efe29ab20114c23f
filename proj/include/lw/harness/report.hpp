#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lw/harness/config.hpp"

namespace lw::harness {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

struct MetricRow {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

struct ThresholdResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunReport {
  int schema_version = kSchemaVersion;
  std::string artifact_version = kArtifactVersion;
  std::string scenario;
  std::string config_text;  // normalized config echo
  std::string config_hash;
  std::vector<MetricRow> rows;  // sorted by (scenario, seed, metric)
  std::map<std::string, double> aggregates;
  std::vector<ThresholdResult> thresholds;
  std::string abductive_table;  // serialized table, S1 only
  double wall_clock_seconds = 0.0;

  bool all_pass() const;
  void sort_rows();
  void compute_aggregates();
};

enum class ReportFormat { kJson, kCsv };

// Writes report.json or metrics.csv into dir; returns the file path.
std::string emit_report(const RunReport& report, const std::string& dir, ReportFormat format);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);
std::string rows_to_csv(const RunReport& report);

// Plain numeric column files per figure analog; returns the paths written.
std::vector<std::string> plot_data_export(const RunReport& report, const std::string& dir);

}  // namespace lw::harness
