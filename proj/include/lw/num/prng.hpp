#pragma once

#include <cstdint>
#include <vector>

namespace lw::num {

// Deterministic counter-seeded stream: xoshiro256++ state derived from
// (seed, stream_id) through splitmix64. Identical (seed, stream_id) gives an
// identical sequence; distinct stream_ids give statistically independent
// streams. Normal variates use Box-Muller with a cached spare.
class PrngStream {
 public:
  PrngStream() : PrngStream(0, 0) {}
  PrngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // uniform on [0, 1)
  double uniform();
  // uniform on [lo, hi)
  double uniform(double lo, double hi);
  // standard normal
  double normal();
  // integer in [0, n)
  std::uint64_t next_below(std::uint64_t n);

  std::vector<double> normals(std::size_t n);

  // Fisher-Yates permutation of {0..n-1}
  std::vector<std::size_t> permutation(std::size_t n);

  // derived independent stream (for per-seed / per-component fan-out)
  PrngStream fork(std::uint64_t sub_id) const;

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lw::num
