#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lw::world {

// Deterministic observable-space reduction: the "common core" map applied
// identically to every tradition's rows. identity returns the input
// unchanged; coordinate_subset keeps the first k coordinates; average_pool
// averages non-overlapping blocks; fixed_random_linear applies a fixed
// seed-derived k x dx matrix.
struct ProjectionSpec {
  enum class Kind : int { kIdentity = 0, kCoordinateSubset = 1, kAveragePool = 2, kFixedRandomLinear = 3 };

  Kind kind = Kind::kIdentity;
  int k = 0;
  int block = 0;
  std::uint64_t seed = 0;

  static ProjectionSpec identity() { return {}; }
  static ProjectionSpec coordinate_subset(int k);
  static ProjectionSpec average_pool(int block);
  static ProjectionSpec fixed_random_linear(int k, std::uint64_t seed);

  int output_width(int dx) const;
  bool is_identity() const { return kind == Kind::kIdentity; }
};

std::vector<double> common_core_project(std::span<const double> x, const ProjectionSpec& proj);

// row-wise application to a (n, dx) row-major batch
std::vector<double> common_core_project_batch(std::span<const double> x, int n, int dx,
                                              const ProjectionSpec& proj);

}  // namespace lw::world
