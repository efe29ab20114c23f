#pragma once

#include <string>
#include <vector>

#include "lw/world/world.hpp"

namespace lw::world {

struct DatasetFile {
  WorldSpec spec;
  std::string hash;
  std::vector<TraditionSamples> traditions;
};

// One record per line: tradition_id,sample_index,x...,z_true... with a
// single '#' header row carrying the world config and its hash. Values use
// 17 significant digits so write/read round-trips exactly.
void write_dataset(const std::string& path, const WorldSpec& spec,
                   const std::vector<TraditionSamples>& traditions);
DatasetFile read_dataset(const std::string& path);

}  // namespace lw::world
