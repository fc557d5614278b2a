#include "driftzero/counting.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "driftzero/errors.hpp"
#include "driftzero/gaussian.hpp"

namespace dz {

namespace {

struct IntervalData {
  double t;     // right endpoint (the sampling time)
  double f_lo;  // f at left endpoint, exact dyadic
  double f_hi;  // f at right endpoint
};

std::vector<IntervalData> level_data(const GammaParam& gamma, int n) {
  std::vector<IntervalData> data;
  data.reserve(std::size_t{1} << n);
  for (const auto& addr : enumerate_intervals(gamma, n)) {
    const auto [lo, hi] = cantor_value_at_endpoints(addr);
    data.push_back({addr.right_endpoint(gamma.gamma), lo.to_double(), hi.to_double()});
  }
  return data;
}

}  // namespace

double interval_hit_prob(const GammaParam& gamma, const CantorAddress& addr) {
  if (addr.base_lo < 1.0)
    throw std::invalid_argument("interval_hit_prob: base left endpoint must be >= 1");
  const double s = addr.right_endpoint(gamma.gamma);
  const auto [f_lo, f_hi] = cantor_value_at_endpoints(addr);
  const double sq = std::sqrt(s);
  const double p = std_normal_cdf(f_hi.to_double() / sq) - std_normal_cdf(f_lo.to_double() / sq);
  return std::max(p, 0.0);
}

CountStats analytic_moments(const GammaParam& gamma, int n, bool with_second) {
  if (n < 1 || n > 12) throw std::invalid_argument("analytic_moments: n outside [1,12]");
  if (with_second && n > 10)
    throw std::invalid_argument("analytic_moments: second moment limited to n <= 10");

  const auto data = level_data(gamma, n);
  CountStats stats{gamma};
  stats.n = n;
  for (const auto& d : data) {
    const double sq = std::sqrt(d.t);
    stats.mean_analytic +=
        std::max(std_normal_cdf(d.f_hi / sq) - std_normal_cdf(d.f_lo / sq), 0.0);
  }

  if (with_second) {
    // E(Z^2) = 2 sum_{I<J} P(both) + E(Z); both events live at the right
    // endpoints t_I < t_J with correlation sqrt(t_I / t_J).
    double cross = 0.0;
    const std::size_t count = data.size();
    for (std::size_t a = 0; a < count; ++a) {
      const double sa = std::sqrt(data[a].t);
      for (std::size_t b = a + 1; b < count; ++b) {
        const double sb = std::sqrt(data[b].t);
        BivariateRect rect{data[a].f_lo / sa, data[a].f_hi / sa, data[b].f_lo / sb,
                           data[b].f_hi / sb, sa / sb};
        cross += bivariate_rect_prob(rect);
      }
    }
    stats.second_moment_analytic = 2.0 * cross + stats.mean_analytic;
  }
  return stats;
}

CountStats mc_counting(const GammaParam& gamma, int n, std::uint64_t paths, SeedSpec seed) {
  if (n < 1 || n > 22) throw std::invalid_argument("mc_counting: n outside [1,22]");
  if (paths < 1) throw std::invalid_argument("mc_counting: paths must be >= 1");
  const std::uint64_t per_path = std::uint64_t{1} << n;
  if (paths > (std::uint64_t{1} << 34) / per_path)
    throw resource_guard_error("mc_counting: paths * 2^n exceeds 2^34");

  const auto data = level_data(gamma, n);
  CountStats stats{gamma};
  stats.n = n;
  stats.paths = paths;
  stats.seed = seed;

  double sum_z = 0.0, sum_z2 = 0.0;
  std::uint64_t positive = 0;
  for (std::uint64_t p = 0; p < paths; ++p) {
    Rng rng(seed.stream(p));
    double b = 0.0, prev_t = 0.0;
    std::uint64_t z = 0;
    for (const auto& d : data) {
      b += std::sqrt(d.t - prev_t) * rng.next_normal();
      prev_t = d.t;
      z += (b >= d.f_lo && b <= d.f_hi);
    }
    const double zd = static_cast<double>(z);
    sum_z += zd;
    sum_z2 += zd * zd;
    positive += (z > 0);
  }

  const double np = static_cast<double>(paths);
  stats.mean_mc = sum_z / np;
  stats.second_moment_mc = sum_z2 / np;
  const double var = std::max(stats.second_moment_mc - stats.mean_mc * stats.mean_mc, 0.0);
  stats.se_mean = std::sqrt(var / np);
  stats.prob_positive_mc = static_cast<double>(positive) / np;
  stats.se_prob = std::sqrt(stats.prob_positive_mc * (1.0 - stats.prob_positive_mc) / np);
  return stats;
}

ConditionalProfile conditional_profile(const GammaParam& gamma, int n) {
  if (gamma.regime() == GammaRegime::subcritical)
    throw std::invalid_argument("conditional_profile: profile not asserted below critical");
  if (n < 1 || n > 10) throw std::invalid_argument("conditional_profile: n outside [1,10]");

  const auto data = level_data(gamma, n);
  ConditionalProfile profile{gamma};
  profile.n = n;
  profile.rows.resize(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) profile.rows[l].l = l;

  const double two_n = std::ldexp(1.0, n);
  double c3 = std::numeric_limits<double>::infinity(), c4 = 0.0;
  const std::size_t count = data.size();
  for (std::size_t a = 0; a < count; ++a) {
    const double sa = std::sqrt(data[a].t);
    const double marginal =
        std::max(std_normal_cdf(data[a].f_hi / sa) - std_normal_cdf(data[a].f_lo / sa), 0.0);
    for (std::size_t b = a + 1; b < count; ++b) {
      const int l = n - std::bit_width(a ^ b);  // common word prefix length
      const double sb = std::sqrt(data[b].t);
      BivariateRect rect{data[a].f_lo / sa, data[a].f_hi / sa, data[b].f_lo / sb,
                         data[b].f_hi / sb, sa / sb};
      const double cond = bivariate_rect_prob(rect) / marginal;
      const double ratio = cond * two_n * std::pow(gamma.gamma, 0.5 * l);

      auto& row = profile.rows[static_cast<std::size_t>(l)];
      if (row.pair_count == 0) {
        row.min_ratio = row.max_ratio = ratio;
      } else {
        row.min_ratio = std::min(row.min_ratio, ratio);
        row.max_ratio = std::max(row.max_ratio, ratio);
      }
      row.mean_cond += cond;
      ++row.pair_count;
      c3 = std::min(c3, ratio);
      c4 = std::max(c4, ratio);
    }
  }
  for (auto& row : profile.rows)
    if (row.pair_count > 0) row.mean_cond /= static_cast<double>(row.pair_count);
  profile.c3_hat = c3;
  profile.c4_hat = c4;
  return profile;
}

}  // namespace dz
