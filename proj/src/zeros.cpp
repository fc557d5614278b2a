#include "driftzero/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "driftzero/errors.hpp"

namespace dz {

std::size_t ZeroSetEstimate::confirmed_count() const {
  std::size_t n = 0;
  for (const auto& c : crossings) n += (c.status == CrossingStatus::confirmed_crossing);
  return n;
}

std::size_t ZeroSetEstimate::possible_count() const {
  std::size_t n = 0;
  for (const auto& c : crossings) n += (c.status == CrossingStatus::possible_zero);
  return n;
}

namespace {

// Levy modulus term 3 sqrt(h log(1/h)); the log factor is floored at 1 so the
// budget stays meaningful on coarse grids.
double levy_budget(double h) { return 3.0 * std::sqrt(h * std::max(std::log(1.0 / h), 1.0)); }

struct RefineContext {
  const DriftFunction* f;
  bool monotone;        // endpoint values bound the interval variation exactly
  double holder_alpha;
  double holder_coeff;  // fallback drift budget = holder_coeff * h^holder_alpha
  Rng* rng;
  std::uint64_t budget;
};

// Exoneration threshold on [t0, t1]: Levy modulus plus a bound on the drift
// variation over the interval (exact endpoint difference for monotone drifts,
// declared/empirical Holder modulus otherwise).
double modulus_budget(const RefineContext& ctx, double h, double f0, double f1) {
  const double drift_var =
      ctx.monotone ? std::fabs(f1 - f0) : ctx.holder_coeff * std::pow(h, ctx.holder_alpha);
  return levy_budget(h) + drift_var;
}

// States carry (time, BM value, drift value); X = v - fv. Bridge-samples the
// interval recursively: sign-change brackets narrow toward the depth floor so
// a cluster of zeros hiding inside one cell resolves into several crossings
// (which then disqualify each other as isolated candidates), same-sign
// stretches are exonerated once they clear the modulus budget at their own
// scale, and whatever is still ambiguous at exhaustion stays possible_zero.
void resolve_interval(RefineContext& ctx, double t0, double v0, double f0, double t1, double v1,
                      double f1, int depth_left, std::vector<Crossing>& out) {
  const double x0 = v0 - f0;
  const double x1 = v1 - f1;
  const double h = t1 - t0;
  const bool crossing = x0 * x1 <= 0.0;
  if (!crossing) {
    // Exonerate when the bridge almost surely stays clear of zero: the dip
    // probability is exp(-2 a0 a1 / h) with endpoint margins shrunk by the
    // drift's deviation from the chord.
    const double w = ctx.monotone ? std::fabs(f1 - f0)
                                  : ctx.holder_coeff * std::pow(h, ctx.holder_alpha);
    const double a0 = std::max(0.0, std::fabs(x0) - w);
    const double a1 = std::max(0.0, std::fabs(x1) - w);
    if (2.0 * a0 * a1 / h > 30.0) return;  // dip probability < 1e-13
  }
  if (depth_left == 0 || ctx.budget == 0 ||
      h < std::ldexp(std::max(std::fabs(t0), std::fabs(t1)), -50)) {
    const auto status =
        crossing ? CrossingStatus::confirmed_crossing : CrossingStatus::possible_zero;
    // Coalesce contiguous fragments of equal status (dyadic splits share
    // endpoints exactly), keeping long ambiguous stretches as one entry.
    if (!out.empty() && out.back().status == status && out.back().t_hi == t0)
      out.back().t_hi = t1;
    else
      out.push_back({t0, t1, status});
    return;
  }
  --ctx.budget;
  const double tm = 0.5 * (t0 + t1);
  const double vm = 0.5 * (v0 + v1) + std::sqrt(h / 4.0) * ctx.rng->next_normal();
  const double fm = (*ctx.f)(tm);
  resolve_interval(ctx, t0, v0, f0, tm, vm, fm, depth_left - 1, out);
  resolve_interval(ctx, tm, vm, fm, t1, v1, f1, depth_left - 1, out);
}

}  // namespace

DriftGrid make_drift_grid(const DriftFunction& f, double a, double b, int depth) {
  if (!(0.0 <= a && a < b)) throw std::invalid_argument("detect_zeros: need 0 <= a < b");
  if (depth < 1 || depth > 24) throw resource_guard_error("detect_zeros: depth outside [1,24]");
  DriftGrid grid{a, b, depth};
  const std::size_t n = std::size_t{1} << depth;
  grid.times.resize(n + 1);
  grid.values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    grid.times[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    grid.values[i] = f(grid.times[i]);
  }
  return grid;
}

ZeroSetEstimate detect_zeros(const DriftFunction& f, const DriftGrid& grid, SeedSpec seed,
                             std::uint64_t refine_budget) {
  const std::size_t n = std::size_t{1} << grid.depth;
  const double h = (grid.b - grid.a) / static_cast<double>(n);

  ZeroSetEstimate est;
  est.resolution = h;
  est.domain_lo = grid.a;
  est.domain_hi = grid.b;
  est.drift_id = f.name();
  est.path_seed = seed;

  Rng rng(seed);
  // Brownian values sampled sequentially along the grid.
  std::vector<double> bm(n + 1);
  double prev_t = 0.0, prev_v = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double dt = grid.times[i] - prev_t;
    bm[i] = (dt > 0) ? prev_v + std::sqrt(dt) * rng.next_normal() : prev_v;
    prev_t = grid.times[i];
    prev_v = bm[i];
  }

  RefineContext ctx{&f, f.monotone(), 0.5, 0.0, &rng, refine_budget};
  if (const auto& hs = f.declared_holder()) {
    ctx.holder_alpha = hs->alpha;
    ctx.holder_coeff = hs->C;
  } else if (!ctx.monotone) {
    // Empirical fallback: grid increments with a 2x safety factor, read as a
    // 1/2-Holder coefficient at the grid scale.
    double max_df = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      max_df = std::max(max_df, std::fabs(grid.values[i + 1] - grid.values[i]));
    ctx.holder_coeff = 2.0 * max_df / std::sqrt(h);
  }

  est.x_samples.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) est.x_samples[i] = bm[i] - grid.values[i];

  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = bm[i] - grid.values[i];
    const double x1 = bm[i + 1] - grid.values[i + 1];
    if (refine_budget > 0) {
      resolve_interval(ctx, grid.times[i], bm[i], grid.values[i], grid.times[i + 1], bm[i + 1],
                       grid.values[i + 1], 12, est.crossings);
      continue;
    }
    if (x0 * x1 <= 0.0)
      est.crossings.push_back(
          {grid.times[i], grid.times[i + 1], CrossingStatus::confirmed_crossing});
    else if (std::min(std::fabs(x0), std::fabs(x1)) <=
             modulus_budget(ctx, h, grid.values[i], grid.values[i + 1]))
      est.crossings.push_back({grid.times[i], grid.times[i + 1], CrossingStatus::possible_zero});
  }
  return est;
}

ZeroSetEstimate detect_zeros(const DriftFunction& f, double a, double b, int depth, SeedSpec seed,
                             std::uint64_t refine_budget) {
  return detect_zeros(f, make_drift_grid(f, a, b, depth), seed, refine_budget);
}

namespace {

bool intersects_cantor(double gamma, int level, double lo, double hi, double a, double b) {
  if (hi < a || lo > b) return false;
  if (level == 0) return true;
  const double len = (b - a) * gamma;
  return intersects_cantor(gamma, level - 1, lo, hi, a, a + len) ||
         intersects_cantor(gamma, level - 1, lo, hi, b - len, b);
}

// Binary digits of f_gamma at a point of the base [1,2]: descending the
// construction either lands in a gap (value exactly dyadic) or yields a
// finite truncation after 52 digits.
DigitStream cantor_value_digits(double gamma, double loc) {
  if (loc <= 1.0) return DigitStream::from_dyadic({0, 0});
  if (loc >= 2.0) return DigitStream::from_dyadic({1, 0});
  double u = loc - 1.0;
  std::uint64_t bits = 0;
  std::vector<int> digits;
  for (int k = 1; k <= 52; ++k) {
    if (u < gamma) {
      bits <<= 1;
      digits.push_back(0);
      u /= gamma;
    } else if (u > 1.0 - gamma) {
      bits = (bits << 1) | 1u;
      digits.push_back(1);
      u = (u - (1.0 - gamma)) / gamma;
    } else {
      // Gap at level k: plateau value 0.d_1...d_{k-1}1 exactly.
      return DigitStream::from_dyadic({(bits << 1) | 1u, k});
    }
  }
  return DigitStream::from_digits(std::move(digits));
}

}  // namespace

IsolationReport isolated_candidates(const ZeroSetEstimate& z, double delta,
                                    std::optional<GammaParam> gamma,
                                    std::optional<ExclusionParams> excl) {
  if (!(delta > 2.0 * z.resolution))
    throw std::invalid_argument("isolated_candidates: delta too small");

  IsolationReport report;
  report.delta = delta;
  if (gamma) {
    report.cantor_level =
        static_cast<int>(std::floor(std::log(1.0 / delta) / std::log(1.0 / gamma->gamma)));
    report.cantor_level = std::max(report.cantor_level, 0);
  }

  // Refinement reports a single zero as a fine confirmed bracket plus
  // possible fragments hugging it, and a hidden zero cluster as fragments
  // spread across its cell. Merge near-contiguous fragments into clusters
  // first: a cluster is one zero location, its extent measures how sharply
  // the refinement pinned it down.
  struct Cluster {
    double lo, hi;
    bool confirmed;
  };
  const double merge_gap = std::min(32.0 * z.resolution, 0.25 * delta);
  std::vector<Cluster> clusters;
  for (const auto& c : z.crossings) {
    const bool conf = c.status == CrossingStatus::confirmed_crossing;
    if (!clusters.empty() && c.t_lo - clusters.back().hi <= merge_gap) {
      auto& b = clusters.back();
      b.hi = std::max(b.hi, c.t_hi);
      b.confirmed = b.confirmed || conf;
    } else {
      clusters.push_back({c.t_lo, c.t_hi, conf});
    }
  }

  // Drift-escape certificate: the gamma-Cantor drift must dominate the
  // square-root modulus around the cluster, |f(t +- d) - f(t)| >= c sqrt(d)
  // for dyadic d in {delta, delta/2, delta/4} on both sides. This is the
  // paper's isolation mechanism made checkable: it holds near two-sided
  // Cantor structure and fails identically wherever f is flat across the
  // halo, so no candidate can sit deep inside a construction gap.
  constexpr double kEscapeC = 0.3;
  auto escape_certified = [&](double lo, double hi) {
    if (!gamma) return true;
    for (int side = 0; side < 2; ++side) {
      const double t = side ? hi : lo;
      const double ft = eval_cantor(*gamma, t);
      double d = delta;
      for (int k = 0; k < 3; ++k, d *= 0.5) {
        const double u = side ? t + d : t - d;
        if (u < 0.0) return false;
        if (std::fabs(eval_cantor(*gamma, u) - ft) < kEscapeC * std::sqrt(d)) return false;
      }
    }
    return true;
  };

  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& cl = clusters[i];
    if (!cl.confirmed) continue;
    const double gap_left =
        (i > 0) ? cl.lo - clusters[i - 1].hi : cl.lo - z.domain_lo;
    const double gap_right =
        (i + 1 < clusters.size()) ? clusters[i + 1].lo - cl.hi : z.domain_hi - cl.hi;
    // Neighbor clusters disqualify; the domain boundary does not.
    if (i > 0 && gap_left < delta) continue;
    if (i + 1 < clusters.size() && gap_right < delta) continue;
    if (!escape_certified(cl.lo, cl.hi)) continue;

    IsolationCandidate cand;
    cand.t_lo = cl.lo;
    cand.t_hi = cl.hi;
    cand.location = 0.5 * (cl.lo + cl.hi);
    cand.gap_left = gap_left;
    cand.gap_right = gap_right;
    if (gamma)
      cand.in_cantor =
          intersects_cantor(gamma->gamma, report.cantor_level, cand.t_lo, cand.t_hi, 1.0, 2.0);
    if (gamma && excl)
      cand.f_value_excluded =
          in_exclusion_set(cantor_value_digits(gamma->gamma, cand.location), *excl, gamma->gamma);
    report.candidates.push_back(cand);
  }
  return report;
}

SingletonReport singleton_experiment(const SingletonDriftParams& params, double horizon,
                                     std::uint64_t paths, SeedSpec seed) {
  if (!(horizon >= 100.0 * params.epsilon))
    throw std::invalid_argument("singleton_experiment: horizon < 100 * epsilon");
  if (paths < 1) throw std::invalid_argument("singleton_experiment: paths must be >= 1");

  // Part A: B(t) - t - epsilon on (0, horizon]. With a globally linear
  // boundary the per-interval bridge crossing probability exp(-2 d d'/dt) is
  // exact, so the estimate has no discretization bias.
  const std::size_t n_tail = 256;
  const double dt_a = horizon / static_cast<double>(n_tail);

  // Part B: zero structure of the full piecewise drift, scanned on a fixed
  // grid over [0, q2 + 2], then the exact linear-tail continuation to the
  // horizon. Drift values on the fixed grid are precomputed once.
  const auto drift = DriftFunction::singleton_piecewise(params);
  const int depth_b = 10;
  const double t_scan = params.q2 + 2.0;
  const auto grid = make_drift_grid(drift, 0.0, t_scan, depth_b);
  const std::size_t n_scan = std::size_t{1} << depth_b;
  const double h_scan = t_scan / static_cast<double>(n_scan);
  const double cluster_gap = 32.0 * h_scan;
  const double f_q2 = eval_cantor(params.gamma, params.q2);
  const std::size_t n_tail_b = 128;
  const double dt_b = std::max((horizon - t_scan) / static_cast<double>(n_tail_b), 0.0);

  std::uint64_t survived = 0, single_cluster = 0;
  for (std::uint64_t p = 0; p < paths; ++p) {
    Rng rng(seed.stream(p));

    bool zero_hit = false;
    double b_val = 0.0, d_prev = params.epsilon;
    for (std::size_t i = 1; i <= n_tail && !zero_hit; ++i) {
      b_val += std::sqrt(dt_a) * rng.next_normal();
      const double d = static_cast<double>(i) * dt_a + params.epsilon - b_val;
      if (d <= 0.0 || rng.next_uniform() < std::exp(-2.0 * d_prev * d / dt_a))
        zero_hit = true;
      d_prev = d;
    }
    survived += !zero_hit;

    // Part B draws continue on the same per-path stream.
    std::size_t clusters = 0;
    double last_cross = -1.0;
    double bm_prev = 0.0, x_prev = -grid.values[0];
    for (std::size_t i = 1; i <= n_scan; ++i) {
      const double bm = bm_prev + std::sqrt(h_scan) * rng.next_normal();
      const double x = bm - grid.values[i];
      if (x_prev * x <= 0.0) {
        if (last_cross < 0.0 || grid.times[i - 1] - last_cross > cluster_gap) ++clusters;
        last_cross = grid.times[i];
      }
      bm_prev = bm;
      x_prev = x;
    }
    if (dt_b > 0.0) {
      bool tail_crossed = false;
      double d_tail = std::fabs(x_prev);
      bool above = x_prev > 0.0;
      double bm = bm_prev;
      for (std::size_t i = 1; i <= n_tail_b && !tail_crossed; ++i) {
        bm += std::sqrt(dt_b) * rng.next_normal();
        const double t = t_scan + static_cast<double>(i) * dt_b;
        const double x = bm - (f_q2 + (t - params.q2));
        if ((x > 0.0) != above || x == 0.0 ||
            rng.next_uniform() < std::exp(-2.0 * d_tail * std::fabs(x) / dt_b))
          tail_crossed = true;
        d_tail = std::fabs(x);
      }
      clusters += tail_crossed;
    }
    single_cluster += (clusters == 1);
  }

  SingletonReport report;
  report.paths = paths;
  const double np = static_cast<double>(paths);
  report.prob_no_zero_linear_tail = static_cast<double>(survived) / np;
  report.se_linear_tail = std::sqrt(
      report.prob_no_zero_linear_tail * (1.0 - report.prob_no_zero_linear_tail) / np);
  report.prob_single_crossing_cluster = static_cast<double>(single_cluster) / np;
  report.se_cluster = std::sqrt(report.prob_single_crossing_cluster *
                                (1.0 - report.prob_single_crossing_cluster) / np);
  return report;
}

SliceEstimate preimage_slice_prob(const GammaParam& gamma, double j_lo, double j_hi, int depth,
                                  std::uint64_t paths, SeedSpec seed) {
  if (gamma.regime() != GammaRegime::subcritical)
    throw std::invalid_argument("preimage_slice_prob: requires gamma < 1/4");
  if (!(0.0 <= j_lo && j_lo <= j_hi && j_hi <= 1.0))
    throw std::invalid_argument("preimage_slice_prob: J outside [0,1]");
  SliceEstimate out;
  out.width = j_hi - j_lo;
  if (j_lo == j_hi) return out;

  // Dyadic alignment: both endpoints must be multiples of a common 2^-k.
  int k = -1;
  for (int cand = 0; cand <= 30; ++cand) {
    const double lo = std::ldexp(j_lo, cand), hi = std::ldexp(j_hi, cand);
    if (lo == std::floor(lo) && hi == std::floor(hi)) {
      k = cand;
      break;
    }
  }
  if (k < 0) throw std::invalid_argument("preimage_slice_prob: J not dyadic-aligned");
  if (depth < k || depth > 22)
    throw std::invalid_argument("preimage_slice_prob: depth outside [k,22]");

  const std::uint64_t a = static_cast<std::uint64_t>(std::ldexp(j_lo, k));
  const std::uint64_t b = static_cast<std::uint64_t>(std::ldexp(j_hi, k));
  const std::uint64_t first = a << (depth - k);
  const std::uint64_t last = (b << (depth - k));  // exclusive
  const std::uint64_t count = last - first;
  if (paths > (std::uint64_t{1} << 34) / std::max<std::uint64_t>(count, 1))
    throw resource_guard_error("preimage_slice_prob: paths * intervals exceeds 2^34");

  std::vector<double> times(count), f_lo(count), f_hi(count);
  for (std::uint64_t w = first; w < last; ++w) {
    const CantorAddress addr{w, depth, 1.0, 2.0};
    const auto [lo, hi] = cantor_value_at_endpoints(addr);
    times[w - first] = addr.right_endpoint(gamma.gamma);
    f_lo[w - first] = lo.to_double();
    f_hi[w - first] = hi.to_double();
  }

  std::uint64_t hits = 0;
  for (std::uint64_t p = 0; p < paths; ++p) {
    Rng rng(seed.stream(p));
    double bm = 0.0, prev_t = 0.0;
    bool hit = false;
    for (std::uint64_t i = 0; i < count; ++i) {
      bm += std::sqrt(times[i] - prev_t) * rng.next_normal();
      prev_t = times[i];
      if (bm >= f_lo[i] && bm <= f_hi[i]) {
        hit = true;
        break;
      }
    }
    hits += hit;
  }
  const double np = static_cast<double>(paths);
  out.probability = static_cast<double>(hits) / np;
  out.se = std::sqrt(out.probability * (1.0 - out.probability) / np);
  return out;
}

RecordReport record_times(const SampledPath& path, const DriftFunction& f, double delta) {
  if (path.size() == 0) throw std::invalid_argument("record_times: empty path");
  RecordReport report;
  report.delta = delta;
  double running_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double x = path.values[i] - f(path.times[i]);
    if (x >= running_max) {
      running_max = x;
      report.record_times.push_back(path.times[i]);
    }
  }
  const auto& rec = report.record_times;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const bool near_left = i > 0 && rec[i] - rec[i - 1] <= delta;
    const bool near_right = i + 1 < rec.size() && rec[i + 1] - rec[i] <= delta;
    report.isolated_count += (!near_left && !near_right);
  }
  return report;
}

}  // namespace dz
