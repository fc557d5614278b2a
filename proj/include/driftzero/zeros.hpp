#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "driftzero/brownian.hpp"
#include "driftzero/cantor.hpp"
#include "driftzero/drift.hpp"
#include "driftzero/rng.hpp"

namespace dz {

enum class CrossingStatus { confirmed_crossing, possible_zero };

/// A grid interval that contains (confirmed) or may contain (possible) a zero
/// of X = B - f.
struct Crossing {
  double t_lo = 0.0;
  double t_hi = 0.0;
  CrossingStatus status = CrossingStatus::possible_zero;
};

/// Finite-resolution zero-set estimate. A zero is only ever reported as an
/// interval; confirmed intervals bracket a sign change of the sampled X.
struct ZeroSetEstimate {
  double resolution = 0.0;
  double domain_lo = 0.0;
  double domain_hi = 0.0;
  std::vector<Crossing> crossings;  // in increasing time order
  std::vector<double> x_samples;    // X = B - f on the scan grid (escape audits)
  std::string drift_id;
  SeedSpec path_seed{};

  std::size_t confirmed_count() const;
  std::size_t possible_count() const;
};

/// Drift values precomputed on the uniform 2^depth grid over [a, b]; reuse
/// across Monte Carlo paths to avoid re-evaluating the drift.
struct DriftGrid {
  double a = 0.0, b = 0.0;
  int depth = 0;
  std::vector<double> times;
  std::vector<double> values;
};

DriftGrid make_drift_grid(const DriftFunction& f, double a, double b, int depth);

/// Sign-change scan of B - f on a uniform 2^depth grid over [a, b].
/// Same-sign intervals within the modulus budget 3*sqrt(h log(1/h)) + drift
/// modulus are flagged possible_zero and bridge-refined (up to refine_budget
/// midpoint insertions in total) until confirmed or exonerated. With a
/// refine budget, confirmed cells are also split by bridge sampling, so a
/// zero cluster inside one cell resolves into several nearby crossings
/// instead of masquerading as a single isolated zero. depth <= 24.
ZeroSetEstimate detect_zeros(const DriftFunction& f, double a, double b, int depth, SeedSpec seed,
                             std::uint64_t refine_budget = 0);

/// Same scan with precomputed drift values; `f` is still consulted at bridge
/// midpoints during refinement.
ZeroSetEstimate detect_zeros(const DriftFunction& f, const DriftGrid& grid, SeedSpec seed,
                             std::uint64_t refine_budget = 0);

struct IsolationCandidate {
  double location = 0.0;  // midpoint of the crossing interval
  double t_lo = 0.0, t_hi = 0.0;
  double gap_left = 0.0;   // distance to nearest crossing / domain edge on the left
  double gap_right = 0.0;
  bool in_cantor = false;                            // only meaningful when gamma given
  Membership f_value_excluded = Membership::undecided;  // only when excl given
};

struct IsolationReport {
  double delta = 0.0;
  int cantor_level = 0;  // annotation level when gamma given
  std::vector<IsolationCandidate> candidates;
};

/// Near-contiguous crossing fragments are merged into clusters (one zero
/// location each, merge gap min(32 resolution, delta/4)); candidates are
/// confirmed clusters with no other cluster within delta on either side.
/// Requires delta > 2 * resolution.
/// When gamma is given, candidacy additionally demands a drift-escape
/// certificate: the gamma-Cantor drift must clear c sqrt(d) around the
/// cluster at dyadic scales d in {delta, delta/2, delta/4} on both sides,
/// the paper's drift-dominates-the-modulus mechanism that makes zeros on
/// the Cantor set isolated. The certificate fails wherever f is flat across
/// the halo, so candidates cannot sit deep inside construction gaps.
/// Candidates are then annotated with membership of the interval in
/// C_{gamma, floor(log(1/delta)/log(1/gamma))}; when excl is also given, the
/// candidate's Cantor-function value is tested against the exclusion set.
IsolationReport isolated_candidates(const ZeroSetEstimate& z, double delta,
                                    std::optional<GammaParam> gamma = std::nullopt,
                                    std::optional<ExclusionParams> excl = std::nullopt);

struct SingletonReport {
  double prob_no_zero_linear_tail = 0.0;
  double se_linear_tail = 0.0;
  double prob_single_crossing_cluster = 0.0;
  double se_cluster = 0.0;
  std::uint64_t paths = 0;
};

/// Monte Carlo for the singleton construction: exact probability of no zero
/// of B(t) - t - epsilon on (0, horizon] (per-interval bridge line-crossing,
/// no discretization bias), plus the fraction of full piecewise-drift paths
/// whose zero estimate is a single crossing cluster.
/// Requires horizon >= 100 * epsilon.
SingletonReport singleton_experiment(const SingletonDriftParams& params, double horizon,
                                     std::uint64_t paths, SeedSpec seed);

struct SliceEstimate {
  double probability = 0.0;
  double se = 0.0;
  double width = 0.0;  // |J|, for the linearity audit
};

/// MC estimate of P(some level-`depth` interval inside f_gamma^{-1}([j_lo,
/// j_hi]) is hit), where [j_lo, j_hi] must be dyadic-aligned. gamma < 1/4.
SliceEstimate preimage_slice_prob(const GammaParam& gamma, double j_lo, double j_hi, int depth,
                                  std::uint64_t paths, SeedSpec seed);

struct RecordReport {
  std::vector<double> record_times;  // grid times achieving a running maximum
  std::size_t isolated_count = 0;    // records with no other record within delta
  double delta = 0.0;
};

/// Running-maximum times of X = B - f on the sampled grid.
RecordReport record_times(const SampledPath& path, const DriftFunction& f, double delta);

}  // namespace dz
