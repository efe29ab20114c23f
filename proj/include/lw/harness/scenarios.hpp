#pragma once

#include "lw/harness/config.hpp"
#include "lw/harness/report.hpp"

namespace lw::harness {

// Acceptance thresholds, pinned here so a scenario run is the regression
// gate. Majority criteria require ceil(0.8 n_seeds) passing seeds (8 of the
// default 10).
namespace thresholds {
inline constexpr double kSeedMajorityFraction = 0.8;
inline constexpr double kS1AlignmentMin = 0.9;        // P-world mean canonical correlation
inline constexpr double kS2OffManifoldFactor = 5.0;   // vs median on-manifold residual
inline constexpr double kS2ControlFactor = 1.5;       // latent-path control tolerance
inline constexpr double kS3R2Margin = 0.3;            // core R^2 <= full R^2 - margin
inline constexpr double kS3CollapseFactor = 0.5;      // core collapse <= factor * full
inline constexpr double kS4MismatchFactor = 2.0;      // mismatched >= factor * matched
inline constexpr double kDpiWitnessMin = 1e-6;        // strict-inequality witness gap
inline constexpr double kOracleNatsPerDimTol = 0.1;   // linear-Gaussian ELBO tolerance
}  // namespace thresholds

// Executes the configured scenario across its seeds (seeds may run on
// parallel threads; each owns independent streams). A failing seed is
// recorded as a seed_error row and the remaining seeds continue. Rows are
// sorted by (scenario, seed, metric) before emission.
RunReport run_scenario(const ExperimentConfig& config);

// S1 model classes share this arch; exposed for tests and budget checks
std::vector<int> default_model_hidden();

}  // namespace lw::harness
