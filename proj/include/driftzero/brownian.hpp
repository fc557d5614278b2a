#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "driftzero/rng.hpp"

namespace dz {

/// Process values on a strictly increasing time grid. Times are >= 0; if the
/// grid starts at 0 the value there is pinned to 0 (origin_pinned).
struct SampledPath {
  std::vector<double> times;
  std::vector<double> values;
  bool origin_pinned = true;

  std::size_t size() const { return times.size(); }
};

/// Brownian motion at the given grid times (sequential independent Gaussian
/// increments; if grid[0] > 0 the first value has variance grid[0]).
/// Throws std::invalid_argument for an empty or non-increasing grid.
SampledPath sample_bm(std::span<const double> grid, SeedSpec seed);

/// Same as sample_bm but draws from a caller-provided stream.
SampledPath sample_bm(std::span<const double> grid, Rng& rng);

/// Inserts the midpoint of interval (times[i], times[i+1]) by Brownian
/// bridging: the inserted value is N((v_i+v_{i+1})/2, (t_{i+1}-t_i)/4)
/// conditionally on the endpoints. Existing entries are never modified.
/// Throws std::out_of_range for a bad index and std::invalid_argument
/// ("interval too small") when the interval is below the resolution floor
/// 2^-52 of the enclosing interval.
SampledPath bridge_refine(const SampledPath& path, std::size_t interval_index, SeedSpec seed);

/// In-place variant used by refinement loops; draws from `rng`.
void bridge_refine_inplace(SampledPath& path, std::size_t interval_index, Rng& rng);

/// Fractional Brownian motion with Hurst index H on the uniform grid
/// {0, T/n, ..., T} (n = points-1), exact finite-dimensional law via
/// covariance Cholesky factorization. points <= 8192 + 1.
/// Throws std::invalid_argument for H outside (0,1) or an oversized grid.
SampledPath sample_fbm(std::size_t points, double horizon, double hurst, SeedSpec seed);

/// Reusable factorization for repeated fBm draws on one grid.
class FbmSampler {
 public:
  FbmSampler(std::size_t points, double horizon, double hurst);
  SampledPath sample(SeedSpec seed) const;
  SampledPath sample(Rng& rng) const;

 private:
  std::size_t points_;
  double horizon_;
  std::vector<double> times_;
  std::vector<double> chol_;  // lower triangle, row-major packed
};

}  // namespace dz
