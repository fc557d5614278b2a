#include "driftzero/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "driftzero/errors.hpp"

namespace dz {

namespace {

// Number of level-k dyadic boxes [j 2^-k, (j+1) 2^-k) meeting the intervals.
std::uint64_t count_boxes(const std::vector<Interval>& intervals, int k) {
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  ranges.reserve(intervals.size());
  const double scale = std::ldexp(1.0, k);
  for (const auto& iv : intervals) {
    const auto lo = static_cast<std::int64_t>(std::floor(iv.lo * scale));
    const auto hi = static_cast<std::int64_t>(std::floor(iv.hi * scale));
    ranges.emplace_back(lo, hi);
  }
  std::sort(ranges.begin(), ranges.end());
  std::uint64_t count = 0;
  std::int64_t covered_to = std::numeric_limits<std::int64_t>::min();  // inclusive
  for (const auto& [lo, hi] : ranges) {
    const std::int64_t from = std::max(lo, covered_to == std::numeric_limits<std::int64_t>::min()
                                               ? lo
                                               : covered_to + 1);
    if (hi >= from) count += static_cast<std::uint64_t>(hi - from + 1);
    covered_to = std::max(covered_to, hi);
  }
  return count;
}

void fit_slope(BoxCountTable& table) {
  // Exclude the two coarsest and two finest scales from the fit.
  std::vector<double> xs, ys;
  for (std::size_t i = 2; i + 2 < table.ks.size(); ++i) {
    if (table.counts[i] == 0) continue;
    xs.push_back(static_cast<double>(table.ks[i]));
    ys.push_back(std::log2(static_cast<double>(table.counts[i])));
  }
  if (xs.size() < 2) {
    table.slope_defined = false;
    return;
  }
  table.fit_k_min = static_cast<int>(xs.front());
  table.fit_k_max = static_cast<int>(xs.back());
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  table.slope = sxy / sxx;
  table.slope_defined = true;
  if (xs.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double res = ys[i] - my - table.slope * (xs[i] - mx);
      rss += res * res;
    }
    table.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
}

}  // namespace

BoxCountTable box_count(const std::vector<Interval>& intervals, int k_min, int k_max) {
  if (k_min < 0 || k_max > 30 || k_min > k_max)
    throw std::invalid_argument("box_count: bad k range");
  for (const auto& iv : intervals)
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw std::invalid_argument("box_count: unbounded or inverted interval");

  BoxCountTable table;
  for (int k = k_min; k <= k_max; ++k) {
    table.ks.push_back(k);
    table.counts.push_back(count_boxes(intervals, k));
  }
  fit_slope(table);
  return table;
}

BoxCountTable box_count(const ZeroSetEstimate& z, int k_min, int k_max, bool include_possible) {
  std::vector<Interval> intervals;
  intervals.reserve(z.crossings.size());
  for (const auto& c : z.crossings)
    if (c.status == CrossingStatus::confirmed_crossing || include_possible)
      intervals.push_back({c.t_lo, c.t_hi});
  return box_count(intervals, k_min, k_max);
}

double covering_sum(const ZeroSetEstimate& z, int k) {
  if (k < 0 || k > 30) throw std::invalid_argument("covering_sum: bad k");
  if (!(z.resolution <= std::ldexp(1.0, -k)))
    throw std::invalid_argument("covering_sum: resolution too coarse for requested scale");
  std::vector<Interval> intervals;
  for (const auto& c : z.crossings)
    if (c.status == CrossingStatus::confirmed_crossing) intervals.push_back({c.t_lo, c.t_hi});
  return static_cast<double>(count_boxes(intervals, k)) * std::exp2(-0.5 * k);
}

std::vector<Interval> defect_set(const DriftFunction& f, double alpha, int n, int grid_depth,
                                 double domain_lo, double domain_hi) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("defect_set: alpha outside (0,1]");
  if (n < 0 || grid_depth < n + 4) throw std::invalid_argument("defect_set: grid_depth < n + 4");
  if (grid_depth > 24) throw resource_guard_error("defect_set: grid_depth > 24");
  if (!(0.0 <= domain_lo && domain_lo < domain_hi))
    throw std::invalid_argument("defect_set: bad domain");

  const std::size_t points = (std::size_t{1} << grid_depth) + 1;
  const double step = (domain_hi - domain_lo) / static_cast<double>(points - 1);

  std::vector<Interval> out;
  bool in_run = false;
  double run_lo = 0.0, run_hi = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = domain_lo + static_cast<double>(i) * step;
    const double ft = f(t);
    bool violates = false;
    for (int j = n + 1; j <= grid_depth && !violates; ++j) {
      const double h = std::ldexp(1.0, -j);
      violates = std::fabs(f(t + h) - ft) > std::pow(h, alpha);
    }
    if (violates) {
      const double lo = std::max(t - 0.5 * step, domain_lo);
      const double hi = std::min(t + 0.5 * step, domain_hi);
      if (in_run && lo <= run_hi) {
        run_hi = hi;
      } else {
        if (in_run) out.push_back({run_lo, run_hi});
        run_lo = lo;
        run_hi = hi;
        in_run = true;
      }
    }
  }
  if (in_run) out.push_back({run_lo, run_hi});
  return out;
}

std::vector<Interval> cantor_intervals(const GammaParam& gamma, int level, double base_lo,
                                       double base_hi) {
  if (level < 1 || level > 24) throw std::invalid_argument("cantor_intervals: level outside [1,24]");
  std::vector<Interval> out;
  out.reserve(std::size_t{1} << level);
  for (const auto& addr : enumerate_intervals(gamma, level, base_lo, base_hi))
    out.push_back({addr.left_endpoint(gamma.gamma), addr.right_endpoint(gamma.gamma)});
  return out;
}

}  // namespace dz
