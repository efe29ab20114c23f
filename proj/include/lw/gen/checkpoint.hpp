#pragma once

#include <string>

#include "lw/gen/vae.hpp"

namespace lw::gen {

// Versioned text checkpoint; values are printed with 17 significant digits
// so the round trip is bit-exact.
void save_model(const TraditionModel& model, const std::string& path);
TraditionModel load_model(const std::string& path);

}  // namespace lw::gen
