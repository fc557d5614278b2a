#pragma once

#include <cstdint>
#include <vector>

#include "driftzero/drift.hpp"
#include "driftzero/zeros.hpp"

namespace dz {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Box counts N(2^-k) over a range of dyadic scales with a least-squares
/// dimension fit of log2 N against k. The fit excludes the two coarsest and
/// two finest scales (boundary/resolution artifacts).
struct BoxCountTable {
  std::vector<int> ks;
  std::vector<std::uint64_t> counts;
  bool slope_defined = false;
  double slope = 0.0;
  double slope_se = 0.0;
  int fit_k_min = 0, fit_k_max = 0;
};

/// N(2^-k) = number of level-k dyadic boxes [j 2^-k, (j+1) 2^-k) meeting the
/// input. k_max <= 30; intervals must lie in a bounded domain.
BoxCountTable box_count(const std::vector<Interval>& intervals, int k_min, int k_max);

/// Box counts of a zero-set estimate; confirmed crossings only by default,
/// include_possible adds the possible_zero intervals (sensitivity table).
BoxCountTable box_count(const ZeroSetEstimate& z, int k_min, int k_max,
                        bool include_possible = false);

/// Sum over level-k dyadic boxes meeting the (confirmed) zero set of
/// (box length)^{1/2} = N(2^-k) * 2^{-k/2}. Requires resolution <= 2^-k.
double covering_sum(const ZeroSetEstimate& z, int k);

/// Grid approximation of the alpha-defect set: points t where
/// |f(t+h) - f(t)| > h^alpha for some dyadic h = 2^-j, n < j <= grid_depth.
/// Returned as merged intervals at grid resolution. grid_depth >= n + 4.
std::vector<Interval> defect_set(const DriftFunction& f, double alpha, int n, int grid_depth,
                                 double domain_lo = 0.0, double domain_hi = 1.0);

/// Level-`level` construction intervals of C_gamma as plain intervals
/// (convenience input for box_count).
std::vector<Interval> cantor_intervals(const GammaParam& gamma, int level, double base_lo = 1.0,
                                       double base_hi = 2.0);

}  // namespace dz
