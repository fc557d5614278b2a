#pragma once

#include <cstdint>
#include <vector>

#include "driftzero/drift.hpp"
#include "driftzero/rng.hpp"

namespace dz {

/// Level retention probabilities p_n = 2^{-beta_n} for fractal percolation on
/// dyadic intervals. The reference schedule beta_n = 1/2 - 2/(n log 2) is
/// clamped to [0, 1) (it is negative for small n) and the clamp is recorded.
struct RetentionSchedule {
  std::vector<double> betas;  // beta_1 .. beta_m
  bool clamped = false;

  static RetentionSchedule reference(int levels);            // the clamped 1/2 - 2/(n log 2)
  static RetentionSchedule constant_beta(double beta, int levels);
  static RetentionSchedule constant_p(double p, int levels);

  int levels() const { return static_cast<int>(betas.size()); }
  double p(int n) const;              // retention probability at level n (1-based)
  double gamma_partial(int m) const;  // beta_1 + ... + beta_m
  double epsilon(int m) const;        // 2^{-(m - gamma_m)}
};

/// Retained dyadic subintervals per level; sparse (only surviving branches).
/// Level-m entries are indices in [0, 2^m) relative to the base interval.
struct PercolationTree {
  int depth = 0;
  double base_lo = 0.0, base_hi = 1.0;
  std::vector<std::vector<std::uint64_t>> levels;  // levels[m-1] = retained at level m
  SeedSpec seed{};

  bool survives() const { return !levels.empty() && !levels.back().empty(); }
};

/// Samples the percolation tree to the given depth. depth <= 24; the
/// schedule must cover the depth.
PercolationTree sample_percolation(const RetentionSchedule& schedule, int depth, double base_lo,
                                   double base_hi, SeedSpec seed);

/// Exact survival probability of the embedded Galton-Watson process with
/// Binomial(2, p) offspring: 0 for p <= 1/2, else 1 - ((1-p)/p)^2.
double gw_survival(double p);

/// Exact joint retention P(I, J both retained at level m) = 2^{-2 gamma_m +
/// gamma_l} for intervals whose common ancestor sits at level l < m.
double pair_retention_prob(const RetentionSchedule& schedule, int m, int l);

struct HawkesReport {
  int m = 0;
  double epsilon = 0.0;
  double mean_y = 0.0, se_y = 0.0;
  double second_y = 0.0, se_y2 = 0.0;
  double prob_v_positive = 0.0, se_p = 0.0;
  std::uint64_t paths = 0;
};

/// Joint Brownian-percolation statistic: per replicate, one percolation tree
/// on [1,2] and one Brownian path sampled at the retained level-m interval
/// centers; Y counts retained intervals with |B(t_I) - f(t_I)| <= epsilon.
/// epsilon_override < 0 selects the schedule's epsilon_m. m <= 18.
HawkesReport joint_hawkes_experiment(const DriftFunction& f, const RetentionSchedule& schedule,
                                     int m, std::uint64_t paths, SeedSpec seed,
                                     double epsilon_override = -1.0);

}  // namespace dz
