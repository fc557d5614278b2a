#include "driftzero/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driftzero/errors.hpp"

namespace dz {

RetentionSchedule RetentionSchedule::reference(int levels) {
  if (levels < 1) throw std::invalid_argument("RetentionSchedule: levels must be >= 1");
  RetentionSchedule s;
  s.betas.reserve(static_cast<std::size_t>(levels));
  for (int n = 1; n <= levels; ++n) {
    const double beta = 0.5 - 2.0 / (n * std::log(2.0));
    if (beta < 0.0) s.clamped = true;
    s.betas.push_back(std::clamp(beta, 0.0, 1.0 - 1e-12));
  }
  return s;
}

RetentionSchedule RetentionSchedule::constant_beta(double beta, int levels) {
  if (levels < 1) throw std::invalid_argument("RetentionSchedule: levels must be >= 1");
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("RetentionSchedule: beta outside [0,1)");
  RetentionSchedule s;
  s.betas.assign(static_cast<std::size_t>(levels), beta);
  return s;
}

RetentionSchedule RetentionSchedule::constant_p(double p, int levels) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("RetentionSchedule: p outside (0,1]");
  return constant_beta(-std::log2(p), levels);
}

double RetentionSchedule::p(int n) const {
  if (n < 1 || n > levels()) throw std::invalid_argument("RetentionSchedule: level out of range");
  return std::exp2(-betas[static_cast<std::size_t>(n - 1)]);
}

double RetentionSchedule::gamma_partial(int m) const {
  if (m < 0 || m > levels()) throw std::invalid_argument("RetentionSchedule: level out of range");
  double acc = 0.0;
  for (int n = 0; n < m; ++n) acc += betas[static_cast<std::size_t>(n)];
  return acc;
}

double RetentionSchedule::epsilon(int m) const {
  return std::exp2(-(static_cast<double>(m) - gamma_partial(m)));
}

PercolationTree sample_percolation(const RetentionSchedule& schedule, int depth, double base_lo,
                                   double base_hi, SeedSpec seed) {
  if (depth < 1 || depth > 24) throw resource_guard_error("sample_percolation: depth outside [1,24]");
  if (depth > schedule.levels())
    throw std::invalid_argument("sample_percolation: schedule shorter than depth");
  if (!(base_lo < base_hi)) throw std::invalid_argument("sample_percolation: empty base");

  PercolationTree tree;
  tree.depth = depth;
  tree.base_lo = base_lo;
  tree.base_hi = base_hi;
  tree.seed = seed;
  tree.levels.resize(static_cast<std::size_t>(depth));

  Rng rng(seed);
  std::vector<std::uint64_t> frontier{0};  // the base interval (level 0)
  for (int level = 1; level <= depth; ++level) {
    const double p = schedule.p(level);
    auto& kept = tree.levels[static_cast<std::size_t>(level - 1)];
    for (std::uint64_t parent : frontier) {
      for (std::uint64_t child = 2 * parent; child <= 2 * parent + 1; ++child)
        if (rng.next_uniform() < p) kept.push_back(child);
    }
    frontier = kept;
    if (frontier.empty()) break;
  }
  return tree;
}

double gw_survival(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gw_survival: p outside [0,1]");
  if (p <= 0.5) return 0.0;
  const double q = (1.0 - p) / p;
  return 1.0 - q * q;
}

double pair_retention_prob(const RetentionSchedule& schedule, int m, int l) {
  if (l < 0 || l >= m) throw std::invalid_argument("pair_retention_prob: need 0 <= l < m");
  if (m > schedule.levels())
    throw std::invalid_argument("pair_retention_prob: schedule shorter than m");
  return std::exp2(-2.0 * schedule.gamma_partial(m) + schedule.gamma_partial(l));
}

HawkesReport joint_hawkes_experiment(const DriftFunction& f, const RetentionSchedule& schedule,
                                     int m, std::uint64_t paths, SeedSpec seed,
                                     double epsilon_override) {
  if (m < 1 || m > 18) throw resource_guard_error("joint_hawkes_experiment: m outside [1,18]");
  if (m > schedule.levels())
    throw std::invalid_argument("joint_hawkes_experiment: schedule shorter than m");
  if (paths < 1) throw std::invalid_argument("joint_hawkes_experiment: paths must be >= 1");

  HawkesReport report;
  report.m = m;
  report.paths = paths;
  report.epsilon = epsilon_override >= 0.0 ? epsilon_override : schedule.epsilon(m);

  // Drift values at all 2^m interval centers of [1,2], computed once.
  const std::size_t cells = std::size_t{1} << m;
  const double width = std::ldexp(1.0, -m);
  std::vector<double> centers(cells), f_at(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    centers[i] = 1.0 + (static_cast<double>(i) + 0.5) * width;
    f_at[i] = f(centers[i]);
  }

  double sum_y = 0.0, sum_y2 = 0.0, sum_y4 = 0.0;
  std::uint64_t positive = 0;
  for (std::uint64_t rep = 0; rep < paths; ++rep) {
    const SeedSpec rep_seed = seed.stream(rep);
    const auto tree = sample_percolation(schedule, m, 1.0, 2.0, rep_seed);
    std::uint64_t y = 0;
    if (static_cast<int>(tree.levels.size()) == m && !tree.levels.back().empty()) {
      // Brownian path sampled only at the retained centers (already sorted).
      Rng rng(rep_seed.stream(rep + (std::uint64_t{1} << 32)));
      double bm = 0.0, prev_t = 0.0;
      for (std::uint64_t idx : tree.levels.back()) {
        const double t = centers[idx];
        bm += std::sqrt(t - prev_t) * rng.next_normal();
        prev_t = t;
        y += (std::fabs(bm - f_at[idx]) <= report.epsilon);
      }
    }
    const double yd = static_cast<double>(y);
    sum_y += yd;
    sum_y2 += yd * yd;
    sum_y4 += yd * yd * yd * yd;
    positive += (y > 0);
  }

  const double np = static_cast<double>(paths);
  report.mean_y = sum_y / np;
  report.second_y = sum_y2 / np;
  report.se_y = std::sqrt(std::max(report.second_y - report.mean_y * report.mean_y, 0.0) / np);
  report.se_y2 =
      std::sqrt(std::max(sum_y4 / np - report.second_y * report.second_y, 0.0) / np);
  report.prob_v_positive = static_cast<double>(positive) / np;
  report.se_p = std::sqrt(report.prob_v_positive * (1.0 - report.prob_v_positive) / np);
  return report;
}

}  // namespace dz
