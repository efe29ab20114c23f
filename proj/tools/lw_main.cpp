// latentworlds command line: world generation, training, evaluation,
// scripted scenarios, and report export.
//
// exit codes: 0 success (all thresholds pass), 1 threshold failure,
// 2 usage/config error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "lw/gen/checkpoint.hpp"
#include "lw/gen/vae.hpp"
#include "lw/harness/config.hpp"
#include "lw/harness/report.hpp"
#include "lw/harness/scenarios.hpp"
#include "lw/world/dataset_io.hpp"
#include "lw/world/world.hpp"

namespace {

using namespace lw;

struct WorldGenArgs {
  std::string config = "P";
  int n_traditions = 3;
  int dz = 2;
  int dx = 16;
  double noise = 0.05;
  std::uint64_t seed = 0;
  int n = 1024;
  std::string out = "dataset.txt";
};

int cmd_world_gen(const WorldGenArgs& a) {
  world::WorldSpec spec;
  spec.config = world::config_from_name(a.config);
  spec.n_traditions = a.n_traditions;
  spec.dz_true = a.dz;
  spec.dx = a.dx;
  spec.noise_sigma = a.noise;
  spec.seed = a.seed;
  world::World w = world::make_world(spec);
  num::PrngStream stream(a.seed, 100);
  auto data = world::sample_dataset(w, a.n, stream);
  world::write_dataset(a.out, spec, data);
  std::cout << "wrote " << a.out << " (config " << a.config << ", " << a.n_traditions
            << " traditions x " << a.n << " samples, hash " << spec.hash() << ")\n";
  return 0;
}

struct TrainArgs {
  std::string data;
  int tradition = 0;
  int dz = 2;
  int epochs = 60;
  int batch = 128;
  double lr = 2e-3;
  int k = 1;
  double obs_sigma = 0.1;
  std::uint64_t seed = 1;
  std::string out = "model.ckpt";
};

int cmd_train(const TrainArgs& a) {
  world::DatasetFile file = world::read_dataset(a.data);
  if (a.tradition < 0 || a.tradition >= static_cast<int>(file.traditions.size()))
    throw std::invalid_argument("train: tradition id out of range");
  num::Tensor rows = world::samples_to_tensor(file.traditions[a.tradition]);

  num::PrngStream init(a.seed, 200);
  gen::TraditionModel model = gen::make_tradition_model(a.dz, rows.cols(), a.obs_sigma, init);
  gen::TrainSchedule sched;
  sched.epochs = a.epochs;
  sched.batch_size = a.batch;
  sched.hyper.lr = a.lr;
  sched.k = a.k;
  num::PrngStream stream(a.seed, 300);
  auto [trained, curve] = gen::train_vae(model, rows, sched, stream);
  gen::save_model(trained, a.out);
  std::cout << "trained tradition " << a.tradition << " for " << a.epochs
            << " epochs; final mean -ELBO " << (curve.empty() ? 0.0 : curve.back()) << "; wrote "
            << a.out << "\n";
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string data;
  int tradition = 0;
  int k = 64;
  std::uint64_t seed = 1;
};

int cmd_eval(const EvalArgs& a) {
  gen::TraditionModel model = gen::load_model(a.model);
  world::DatasetFile file = world::read_dataset(a.data);
  if (a.tradition < 0 || a.tradition >= static_cast<int>(file.traditions.size()))
    throw std::invalid_argument("eval: tradition id out of range");
  num::Tensor rows = world::samples_to_tensor(file.traditions[a.tradition]);
  num::PrngStream stream(a.seed, 400);
  const double total = gen::heldout_elbo(model, rows, a.k, stream);
  std::printf("heldout ELBO: %.6f nats (%.6f nats/dim over %d rows)\n", total,
              total / model.dx, rows.rows());
  return 0;
}

struct ScenarioArgs {
  std::string name;
  std::string config_path;
  std::string out;
};

int cmd_scenario_run(const ScenarioArgs& a) {
  const harness::Scenario sc = harness::scenario_from_name(a.name);
  harness::ExperimentConfig cfg =
      a.config_path.empty() ? harness::default_config(sc) : harness::load_config(a.config_path);
  if (cfg.scenario != sc)
    throw std::invalid_argument("scenario mismatch: config file says " +
                                harness::scenario_name(cfg.scenario) + ", command line says " +
                                a.name);
  if (!a.out.empty()) cfg.out_dir = a.out;

  harness::RunReport report = harness::run_scenario(cfg);
  const std::string json_path =
      harness::emit_report(report, cfg.out_dir, harness::ReportFormat::kJson);
  const std::string csv_path =
      harness::emit_report(report, cfg.out_dir, harness::ReportFormat::kCsv);
  auto plots = harness::plot_data_export(report, cfg.out_dir);

  std::cout << "scenario " << report.scenario << " done in " << report.wall_clock_seconds
            << " s\n";
  for (const auto& t : report.thresholds)
    std::cout << "  [" << (t.pass ? "pass" : "FAIL") << "] " << t.name << " (" << t.detail
              << ")\n";
  std::cout << "wrote " << json_path << ", " << csv_path;
  for (const auto& p : plots) std::cout << ", " << p;
  std::cout << "\n";
  return report.all_pass() ? 0 : 1;
}

struct ExportArgs {
  std::string in;
  std::string format = "json";
  std::string out = ".";
};

int cmd_report_export(const ExportArgs& a) {
  std::ifstream is(a.in);
  if (!is) throw std::runtime_error("report export: cannot open " + a.in);
  std::ostringstream buf;
  buf << is.rdbuf();
  harness::RunReport report = harness::report_from_json(buf.str());
  const harness::ReportFormat fmt = a.format == "csv"
                                        ? harness::ReportFormat::kCsv
                                        : harness::ReportFormat::kJson;
  if (a.format != "csv" && a.format != "json")
    throw std::invalid_argument("report export: format must be json or csv");
  const std::string path = harness::emit_report(report, a.out, fmt);
  auto plots = harness::plot_data_export(report, a.out);
  std::cout << "wrote " << path;
  for (const auto& p : plots) std::cout << ", " << p;
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latentworlds: multi-decoder VAE testbed on synthetic ground-truth worlds"};
  app.require_subcommand(1);

  // world gen
  auto* world_cmd = app.add_subcommand("world", "ground-truth world operations");
  world_cmd->require_subcommand(1);
  WorldGenArgs wg;
  auto* gen_cmd = world_cmd->add_subcommand("gen", "generate a world and sample a dataset file");
  gen_cmd->add_option("--config", wg.config, "world configuration: E, U, or P");
  gen_cmd->add_option("--n-traditions", wg.n_traditions, "number of traditions");
  gen_cmd->add_option("--dz", wg.dz, "true latent dimension");
  gen_cmd->add_option("--dx", wg.dx, "observable dimension");
  gen_cmd->add_option("--noise", wg.noise, "observation noise sigma");
  gen_cmd->add_option("--seed", wg.seed, "world seed");
  gen_cmd->add_option("--n", wg.n, "samples per tradition");
  gen_cmd->add_option("--out", wg.out, "output dataset path");

  // train
  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "train a tradition model on a dataset file");
  train_cmd->add_option("--data", tr.data, "dataset file")->required();
  train_cmd->add_option("--tradition", tr.tradition, "tradition id");
  train_cmd->add_option("--dz", tr.dz, "model latent dimension");
  train_cmd->add_option("--epochs", tr.epochs, "training epochs");
  train_cmd->add_option("--batch", tr.batch, "batch size");
  train_cmd->add_option("--lr", tr.lr, "learning rate");
  train_cmd->add_option("--k", tr.k, "ELBO samples per datum");
  train_cmd->add_option("--obs-sigma", tr.obs_sigma, "observation noise of the model");
  train_cmd->add_option("--seed", tr.seed, "training seed");
  train_cmd->add_option("--out", tr.out, "checkpoint output path");

  // eval
  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate held-out ELBO of a checkpoint");
  eval_cmd->add_option("--model", ev.model, "checkpoint path")->required();
  eval_cmd->add_option("--data", ev.data, "dataset file")->required();
  eval_cmd->add_option("--tradition", ev.tradition, "tradition id");
  eval_cmd->add_option("--k", ev.k, "ELBO samples per datum");
  eval_cmd->add_option("--seed", ev.seed, "evaluation seed");

  // scenario run
  ScenarioArgs sa;
  auto* scen_cmd = app.add_subcommand("scenario", "scripted experiment scenarios");
  scen_cmd->require_subcommand(1);
  auto* run_cmd = scen_cmd->add_subcommand("run", "run a scenario across its seeds");
  run_cmd->add_option("name", sa.name, "scenario name (S1..S6)")->required();
  run_cmd->add_option("--config", sa.config_path, "config file (defaults if omitted)");
  run_cmd->add_option("--out", sa.out, "output directory (overrides config)");

  // report export
  ExportArgs ex;
  auto* report_cmd = app.add_subcommand("report", "report post-processing");
  report_cmd->require_subcommand(1);
  auto* export_cmd = report_cmd->add_subcommand("export", "re-emit a report and plot data");
  export_cmd->add_option("--in", ex.in, "input report.json")->required();
  export_cmd->add_option("--format", ex.format, "json or csv");
  export_cmd->add_option("--out", ex.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen_cmd->parsed()) return cmd_world_gen(wg);
    if (train_cmd->parsed()) return cmd_train(tr);
    if (eval_cmd->parsed()) return cmd_eval(ev);
    if (run_cmd->parsed()) return cmd_scenario_run(sa);
    if (export_cmd->parsed()) return cmd_report_export(ex);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
