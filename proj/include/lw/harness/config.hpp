#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lw/gen/vae.hpp"
#include "lw/world/world.hpp"

namespace lw::harness {

enum class Scenario { S1, S2, S3, S4, S5, S6 };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

// All defaults live in default_config(); load_config only overrides fields
// that appear in the file and rejects unknown keys.
struct ExperimentConfig {
  Scenario scenario = Scenario::S1;
  std::vector<std::uint64_t> seeds;  // default 1..10
  std::string out_dir = "out";

  world::WorldSpec world;  // per-seed worlds use world.seed + seed as the base

  gen::TrainSchedule train;

  int n_train = 1024;
  int n_eval = 512;
  int eval_k = 64;

  // common-core projection used by S3 and the S1 U-core class
  world::ProjectionSpec core;

  std::string canonical_string() const;
  std::string hash() const;
};

ExperimentConfig default_config(Scenario scenario);

// Sectioned key=value text: top-level keys, then [world], [train], [data]
// sections. Unknown keys, bad values, and a missing scenario are errors.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

// normalized text form; parse(serialize(c)) == c
std::string serialize_config(const ExperimentConfig& config);

}  // namespace lw::harness
