#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "driftzero/cantor.hpp"
#include "driftzero/rng.hpp"

namespace dz {

/// Moments of the counting variable Z_{gamma,n} = #{level-n intervals I with
/// B(s_I) in [f(r_I), f(s_I)]}, analytic and Monte Carlo.
struct CountStats {
  GammaParam gamma;
  int n = 0;
  double mean_analytic = 0.0;
  std::optional<double> second_moment_analytic;
  double mean_mc = 0.0;
  double second_moment_mc = 0.0;
  double prob_positive_mc = 0.0;
  double se_mean = 0.0;
  double se_prob = 0.0;
  std::uint64_t paths = 0;
  SeedSpec seed{};
};

/// Exact P(B(s) in [f(r), f(s)]) = Phi(f(s)/sqrt(s)) - Phi(f(r)/sqrt(s)) for
/// the addressed interval I = [r, s]. Requires base left endpoint >= 1.
double interval_hit_prob(const GammaParam& gamma, const CantorAddress& addr);

/// Exact first moment (n <= 12) and, when requested, second moment via the
/// pairwise bivariate-CDF double sum (n <= 10).
CountStats analytic_moments(const GammaParam& gamma, int n, bool with_second);

/// Monte Carlo estimate of E(Z), E(Z^2), P(Z > 0): each path samples B
/// sequentially at the 2^n right endpoints (no discretization bias).
/// n <= 22; guards paths * 2^n <= 2^34.
CountStats mc_counting(const GammaParam& gamma, int n, std::uint64_t paths, SeedSpec seed);

/// Exact conditional probabilities P(Z_n(J) | Z_n(I)) grouped by separation
/// level l (length of the common word prefix of I < J).
struct ConditionalRow {
  int l = 0;
  std::uint64_t pair_count = 0;
  double min_ratio = 0.0;   // min over pairs of cond_prob * 2^n * gamma^(l/2)
  double max_ratio = 0.0;
  double mean_cond = 0.0;   // average conditional probability in the group
};

struct ConditionalProfile {
  GammaParam gamma;
  int n = 0;
  std::vector<ConditionalRow> rows;  // l = 0 .. n-1
  double c3_hat = 0.0;               // min ratio over all pairs
  double c4_hat = 0.0;               // max ratio over all pairs
};

/// Requires gamma >= 1/4 (the bounds are not asserted below critical) and
/// n <= 10.
ConditionalProfile conditional_profile(const GammaParam& gamma, int n);

}  // namespace dz
