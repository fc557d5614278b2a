#pragma once

#include <cstdint>
#include <vector>

namespace dz {

/// Identifies one reproducible random substream. Identical (master_seed,
/// stream_index) pairs yield identical sample sequences regardless of the
/// parallelism degree, so Monte Carlo tasks key their stream on the task index.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  SeedSpec stream(std::uint64_t index) const { return {master_seed, index}; }
};

/// xoshiro256++ with splitmix64 seeding. Self-contained so that sequences are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(SeedSpec seed);

  std::uint64_t next_u64();

  /// Uniform on (0,1), 53-bit resolution, never exactly 0 or 1.
  double next_uniform();

  /// Standard normal via the polar (Marsaglia) method; caches the spare value.
  double next_normal();

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// `count` i.i.d. N(0,1) samples, reproducible per SeedSpec.
std::vector<double> gaussian_stream(SeedSpec seed, std::size_t count);

}  // namespace dz
