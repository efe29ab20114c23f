#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lw/harness/config.hpp"
#include "lw/harness/report.hpp"
#include "lw/harness/scenarios.hpp"

using namespace lw;
using namespace lw::harness;

namespace {

// small fast override used by the execution smoke tests
ExperimentConfig tiny_config(Scenario sc) {
  ExperimentConfig c = default_config(sc);
  c.seeds = {1, 2};
  c.world.dx = 8;
  c.train.epochs = sc == Scenario::S2 ? 0 : 4;
  c.train.batch_size = 64;
  c.n_train = 256;
  c.n_eval = 128;
  c.eval_k = 8;
  c.core = world::ProjectionSpec::coordinate_subset(2);
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config: scenario line alone yields full defaults") {
  ExperimentConfig c = parse_config("scenario=S2\n");
  CHECK(c.scenario == Scenario::S2);
  CHECK(c.seeds.size() == 10);
  CHECK(c.world.dx == 16);
  CHECK(c.train.epochs == 0);  // S2 needs no training
  CHECK(c.core.k == 4);
}

TEST_CASE("config: unknown keys are rejected by name") {
  try {
    parse_config("scenario=S1\nfoo=1\n");
    FAIL("expected an exception");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
  CHECK_THROWS(parse_config("scenario=S1\n[world]\nbar=2\n"));
  CHECK_THROWS(parse_config("scenario=S1\n[nosuch]\nx=1\n"));
}

TEST_CASE("config: missing scenario and type mismatches are errors") {
  CHECK_THROWS(parse_config("seeds=1,2\n"));
  CHECK_THROWS(parse_config("scenario=S1\n[train]\nepochs=abc\n"));
  CHECK_THROWS(parse_config("scenario=S1\n[world]\ndx=1.5\n"));
}

TEST_CASE("config: serialize-load round trip is stable") {
  ExperimentConfig c = parse_config(
      "scenario=S3\nseeds=3,5,7\n[world]\ndx=8\nnoise_sigma=0.1\n[train]\nepochs=12\n");
  const std::string text = serialize_config(c);
  ExperimentConfig c2 = parse_config(text);
  CHECK(serialize_config(c2) == text);
  CHECK(c2.hash() == c.hash());
  CHECK(c2.seeds == c.seeds);
}

TEST_CASE("S3 runs, emits sorted structured rows, and is byte-deterministic") {
  ExperimentConfig cfg = tiny_config(Scenario::S3);
  RunReport r1 = run_scenario(cfg);
  RunReport r2 = run_scenario(cfg);

  CHECK(r1.rows == r2.rows);
  CHECK(rows_to_csv(r1) == rows_to_csv(r2));
  CHECK(r1.config_hash == cfg.hash());
  CHECK(!r1.thresholds.empty());

  // rows sorted by (scenario, seed, metric)
  for (std::size_t i = 1; i < r1.rows.size(); ++i) {
    const auto& a = r1.rows[i - 1];
    const auto& b = r1.rows[i];
    const bool ordered =
        a.seed < b.seed || (a.seed == b.seed && a.metric < b.metric);
    CHECK(ordered);
  }

  // per-seed metrics exist for both seeds
  int r2_full_count = 0;
  for (const auto& row : r1.rows)
    if (row.metric == "s3_r2_full") ++r2_full_count;
  CHECK(r2_full_count == 2);
}

TEST_CASE("report json and csv round trips") {
  ExperimentConfig cfg = tiny_config(Scenario::S3);
  RunReport report = run_scenario(cfg);

  const std::string json = report_to_json(report);
  RunReport back = report_from_json(json);
  CHECK(back.rows == report.rows);
  CHECK(back.scenario == report.scenario);
  CHECK(back.config_hash == report.config_hash);
  CHECK(back.schema_version == report.schema_version);
  CHECK(report_to_json(back) == json);

  const std::string csv = rows_to_csv(report);
  CHECK(csv.rfind("schema_version,scenario,seed,metric,value\n", 0) == 0);
  // row count = header + one line per metric row
  const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == report.rows.size() + 1);
}

TEST_CASE("emitted files and plot exports are byte-stable") {
  ExperimentConfig cfg = tiny_config(Scenario::S3);
  cfg.out_dir = "harness_test_out";
  RunReport report = run_scenario(cfg);

  emit_report(report, cfg.out_dir, ReportFormat::kJson);
  emit_report(report, cfg.out_dir, ReportFormat::kCsv);
  auto plots1 = plot_data_export(report, cfg.out_dir);
  REQUIRE(!plots1.empty());
  const std::string first = read_file(plots1[0]);
  auto plots2 = plot_data_export(report, cfg.out_dir);
  CHECK(read_file(plots2[0]) == first);

  // only finite numbers in the plot files
  std::istringstream is(first);
  std::string line;
  std::getline(is, line);  // header comment
  double v;
  while (is >> v) CHECK(std::isfinite(v));

  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("S5 and S6 execute end to end on tiny configs") {
  for (Scenario sc : {Scenario::S5, Scenario::S6}) {
    ExperimentConfig cfg = tiny_config(sc);
    cfg.seeds = {1};
    RunReport r = run_scenario(cfg);
    bool has_error = false;
    for (const auto& row : r.rows)
      if (row.metric == "seed_error") has_error = true;
    CHECK(!has_error);
    CHECK(!r.rows.empty());
  }
}

TEST_CASE("a failing seed is recorded and the rest continue") {
  ExperimentConfig cfg = tiny_config(Scenario::S3);
  cfg.seeds = {1, 2};
  cfg.n_train = 16;  // smaller than one batch: train_vae throws per seed
  cfg.n_eval = 130;
  RunReport r = run_scenario(cfg);
  int errors = 0;
  for (const auto& row : r.rows)
    if (row.metric == "seed_error") ++errors;
  CHECK(errors == 2);
  CHECK_FALSE(r.all_pass());
}
