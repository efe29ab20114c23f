#include "lw/world/projection.hpp"

#include <cmath>
#include <stdexcept>

#include "lw/num/prng.hpp"

namespace lw::world {

ProjectionSpec ProjectionSpec::coordinate_subset(int k) {
  if (k <= 0) throw std::invalid_argument("coordinate_subset: k must be positive");
  ProjectionSpec p;
  p.kind = Kind::kCoordinateSubset;
  p.k = k;
  return p;
}

ProjectionSpec ProjectionSpec::average_pool(int block) {
  if (block <= 0) throw std::invalid_argument("average_pool: block must be positive");
  ProjectionSpec p;
  p.kind = Kind::kAveragePool;
  p.block = block;
  return p;
}

ProjectionSpec ProjectionSpec::fixed_random_linear(int k, std::uint64_t seed) {
  if (k <= 0) throw std::invalid_argument("fixed_random_linear: k must be positive");
  ProjectionSpec p;
  p.kind = Kind::kFixedRandomLinear;
  p.k = k;
  p.seed = seed;
  return p;
}

int ProjectionSpec::output_width(int dx) const {
  switch (kind) {
    case Kind::kIdentity: return dx;
    case Kind::kCoordinateSubset:
      if (k > dx) throw std::invalid_argument("coordinate_subset: k exceeds input width");
      return k;
    case Kind::kAveragePool:
      if (dx % block != 0) throw std::invalid_argument("average_pool: width not divisible by block");
      return dx / block;
    case Kind::kFixedRandomLinear:
      if (k > dx) throw std::invalid_argument("fixed_random_linear: k exceeds input width");
      return k;
  }
  throw std::logic_error("projection: unknown kind");
}

std::vector<double> common_core_project(std::span<const double> x, const ProjectionSpec& proj) {
  const int dx = static_cast<int>(x.size());
  const int out_w = proj.output_width(dx);
  std::vector<double> out(static_cast<std::size_t>(out_w));
  switch (proj.kind) {
    case ProjectionSpec::Kind::kIdentity:
      out.assign(x.begin(), x.end());
      break;
    case ProjectionSpec::Kind::kCoordinateSubset:
      for (int i = 0; i < out_w; ++i) out[i] = x[i];
      break;
    case ProjectionSpec::Kind::kAveragePool:
      for (int i = 0; i < out_w; ++i) {
        double acc = 0.0;
        for (int j = 0; j < proj.block; ++j) acc += x[static_cast<std::size_t>(i) * proj.block + j];
        out[i] = acc / proj.block;
      }
      break;
    case ProjectionSpec::Kind::kFixedRandomLinear: {
      // matrix regenerated deterministically from (seed, dx, k)
      num::PrngStream s(proj.seed, 0xC0DEuLL);
      std::vector<double> w(static_cast<std::size_t>(proj.k) * dx);
      const double scale = 1.0 / std::sqrt(static_cast<double>(dx));
      for (auto& v : w) v = s.normal() * scale;
      for (int i = 0; i < out_w; ++i) {
        double acc = 0.0;
        const double* row = w.data() + static_cast<std::size_t>(i) * dx;
        for (int j = 0; j < dx; ++j) acc += row[j] * x[j];
        out[i] = acc;
      }
      break;
    }
  }
  return out;
}

std::vector<double> common_core_project_batch(std::span<const double> x, int n, int dx,
                                              const ProjectionSpec& proj) {
  const int out_w = proj.output_width(dx);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n) * out_w);
  for (int i = 0; i < n; ++i) {
    auto row = common_core_project(x.subspan(static_cast<std::size_t>(i) * dx, dx), proj);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace lw::world
