#include "driftzero/brownian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace dz {

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("sample_bm: empty grid");
  if (grid[0] < 0) throw std::invalid_argument("sample_bm: negative time");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sample_bm: grid not increasing");
}

}  // namespace

SampledPath sample_bm(std::span<const double> grid, Rng& rng) {
  check_grid(grid);
  SampledPath path;
  path.times.assign(grid.begin(), grid.end());
  path.values.resize(grid.size());
  path.origin_pinned = true;
  double prev_t = 0.0, prev_v = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double dt = grid[i] - prev_t;
    path.values[i] = (dt > 0) ? prev_v + std::sqrt(dt) * rng.next_normal() : prev_v;
    prev_t = grid[i];
    prev_v = path.values[i];
  }
  return path;
}

SampledPath sample_bm(std::span<const double> grid, SeedSpec seed) {
  Rng rng(seed);
  return sample_bm(grid, rng);
}

void bridge_refine_inplace(SampledPath& path, std::size_t interval_index, Rng& rng) {
  if (interval_index + 1 >= path.times.size())
    throw std::out_of_range("bridge_refine: interval index out of range");
  const double t0 = path.times[interval_index];
  const double t1 = path.times[interval_index + 1];
  const double dt = t1 - t0;
  // Resolution floor: below 2^-52 of the enclosing interval the midpoint is
  // no longer distinct in binary floating point.
  if (dt < std::ldexp(std::max(std::fabs(t0), std::fabs(t1)), -52) || dt <= 0)
    throw std::invalid_argument("bridge_refine: interval too small");
  const double mid_t = 0.5 * (t0 + t1);
  const double mean = 0.5 * (path.values[interval_index] + path.values[interval_index + 1]);
  const double mid_v = mean + std::sqrt(dt / 4.0) * rng.next_normal();
  path.times.insert(path.times.begin() + interval_index + 1, mid_t);
  path.values.insert(path.values.begin() + interval_index + 1, mid_v);
}

SampledPath bridge_refine(const SampledPath& path, std::size_t interval_index, SeedSpec seed) {
  SampledPath out = path;
  Rng rng(seed);
  bridge_refine_inplace(out, interval_index, rng);
  return out;
}

FbmSampler::FbmSampler(std::size_t points, double horizon, double hurst)
    : points_(points), horizon_(horizon) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("sample_fbm: H outside (0,1)");
  if (points < 2 || points > (1u << 13) + 1)
    throw std::invalid_argument("sample_fbm: grid too large (max 2^13 intervals)");
  if (!(horizon > 0)) throw std::invalid_argument("sample_fbm: nonpositive horizon");

  const std::size_t n = points - 1;  // t=0 is pinned at 0, factorize the rest
  times_.resize(points);
  for (std::size_t i = 0; i < points; ++i)
    times_[i] = horizon * static_cast<double>(i) / static_cast<double>(n);

  Eigen::MatrixXd cov(n, n);
  const double two_h = 2.0 * hurst;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = times_[i + 1], t = times_[j + 1];
      const double c = 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) -
                              std::pow(std::fabs(s - t), two_h));
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_fbm: covariance factorization failure");
  Eigen::MatrixXd lower = llt.matrixL();
  chol_.resize(n * (n + 1) / 2);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) chol_[k++] = lower(i, j);
}

SampledPath FbmSampler::sample(Rng& rng) const {
  const std::size_t n = points_ - 1;
  std::vector<double> z(n);
  for (auto& x : z) x = rng.next_normal();
  SampledPath path;
  path.times = times_;
  path.values.assign(points_, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += chol_[k++] * z[j];
    path.values[i + 1] = acc;
  }
  return path;
}

SampledPath FbmSampler::sample(SeedSpec seed) const {
  Rng rng(seed);
  return sample(rng);
}

SampledPath sample_fbm(std::size_t points, double horizon, double hurst, SeedSpec seed) {
  return FbmSampler(points, horizon, hurst).sample(seed);
}

}  // namespace dz
