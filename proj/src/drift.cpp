#include "driftzero/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dz {

LoudParams::LoudParams(double alpha_, int A_, int term_count_)
    : alpha(alpha_), A(A_), term_count(term_count_) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("LoudParams: alpha outside (0,1)");
  if (A < 1) throw std::invalid_argument("LoudParams: A must be a positive integer");
  if (term_count < 1) throw std::invalid_argument("LoudParams: term_count must be positive");
  if (!(2.0 * A * (1.0 - alpha) > 1.0))
    throw std::invalid_argument("LoudParams: need 2A(1-alpha) > 1");
}

SingletonDriftParams::SingletonDriftParams(double c_, double delta_, double q1_, double q2_,
                                           GammaParam gamma_, double epsilon_)
    : c(c_), delta(delta_), q1(q1_), q2(q2_), gamma(gamma_), epsilon(epsilon_) {
  if (!(c > 0)) throw std::invalid_argument("SingletonDriftParams: c must be positive");
  if (!(0 < delta && delta < q1 && q1 < q2))
    throw std::invalid_argument("SingletonDriftParams: need 0 < delta < q1 < q2");
  if (!(epsilon >= 0))
    throw std::invalid_argument("SingletonDriftParams: epsilon must be nonnegative");
}

double loud_triangle(double t) {
  double r = std::fmod(t, 2.0);
  if (r < 0) r += 2.0;
  return (r <= 1.0) ? r : 2.0 - r;
}

double loud_term(const LoudParams& params, int m, double t) {
  // 2^{-2 A alpha m} g0(2^{2 A m} t); the argument scale is an exact power of two.
  return std::exp2(-2.0 * params.A * params.alpha * m) *
         loud_triangle(std::ldexp(t, 2 * params.A * m));
}

double loud_eval(const LoudParams& params, double t) {
  double acc = 0.0;
  for (int k = params.term_count; k >= 1; --k) acc += loud_term(params, k, t);
  return acc;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Cascade drift: on each block [4^{-n}, 4^{-n+1}] (n any integer) the value is
// 2^{-n} (1 + f_gamma(t)) where t in [0,1] is the block-local coordinate and
// f_gamma lives on the unit base. Blocks agree at shared endpoints, and the
// whole function decays to 0 at the origin.
double cascade_eval(const GammaParam& gamma, double s) {
  if (s == 0.0) return 0.0;
  // Block index n with 4^{-n} <= s <= 4^{-n+1}.
  int n = static_cast<int>(std::ceil(-std::log2(s) / 2.0));
  while (std::ldexp(1.0, -2 * n) > s) ++n;
  while (std::ldexp(1.0, -2 * (n - 1)) < s) --n;
  const double t = (std::ldexp(s, 2 * n) - 1.0) / 3.0;
  return std::ldexp(1.0 + eval_cantor(gamma, t, 0.0, 1.0), -n);
}

}  // namespace

DriftFunction DriftFunction::cantor(GammaParam gamma, double base_lo, double base_hi) {
  if (!(base_lo < base_hi)) throw std::invalid_argument("cantor drift: empty base interval");
  std::string name = "cantor(gamma=" + fmt(gamma.gamma) + ")";
  return DriftFunction(
      Kind::cantor, std::move(name),
      [gamma, base_lo, base_hi](double t) { return eval_cantor(gamma, t, base_lo, base_hi); },
      /*monotone=*/true);
}

DriftFunction DriftFunction::cascade(GammaParam gamma) {
  std::string name = "cascade(gamma=" + fmt(gamma.gamma) + ")";
  return DriftFunction(Kind::cascade, std::move(name),
                       [gamma](double t) { return cascade_eval(gamma, t); },
                       /*monotone=*/true);
}

DriftFunction DriftFunction::loud(const LoudParams& params) {
  std::string name = "loud(alpha=" + fmt(params.alpha) + ",A=" + fmt(params.A) +
                     ",K=" + fmt(params.term_count) + ")";
  return DriftFunction(Kind::loud, std::move(name),
                       [params](double t) { return loud_eval(params, t); });
}

DriftFunction DriftFunction::singleton_piecewise(const SingletonDriftParams& p) {
  const double f_delta = -p.c * std::cbrt(p.delta);
  const double f_q1 = eval_cantor(p.gamma, p.q1);
  const double f_q2 = eval_cantor(p.gamma, p.q2);
  const double slope = (f_q1 - f_delta) / (p.q1 - p.delta);
  std::string name = "singleton(c=" + fmt(p.c) + ",gamma=" + fmt(p.gamma.gamma) + ")";
  return DriftFunction(Kind::singleton_piecewise, std::move(name),
                       [p, f_delta, f_q2, slope](double t) {
                         if (t <= p.delta) return -p.c * std::cbrt(t);
                         if (t <= p.q1) return f_delta + slope * (t - p.delta);
                         if (t <= p.q2) return eval_cantor(p.gamma, t);
                         return f_q2 + (t - p.q2);
                       });
}

DriftFunction DriftFunction::linear(double slope, double intercept) {
  std::string name = "linear(slope=" + fmt(slope) + ",intercept=" + fmt(intercept) + ")";
  return DriftFunction(Kind::linear, std::move(name),
                       [slope, intercept](double t) { return intercept + slope * t; },
                       /*monotone=*/true);
}

DriftFunction DriftFunction::cube_root(double coefficient) {
  std::string name = "cube_root(c=" + fmt(coefficient) + ")";
  return DriftFunction(Kind::cube_root, std::move(name),
                       [coefficient](double t) { return coefficient * std::cbrt(t); },
                       /*monotone=*/true);
}

DriftFunction DriftFunction::fbm_sample(SampledPath path, double hurst) {
  if (path.size() < 2) throw std::invalid_argument("fbm drift: need at least two sample points");
  std::string name = "fbm(H=" + fmt(hurst) + ")";
  auto fn = [path = std::move(path)](double t) {
    const auto& ts = path.times;
    if (t <= ts.front()) return path.values.front();
    if (t >= ts.back()) return path.values.back();  // constant extension past the grid
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
    const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
    return (1.0 - w) * path.values[i] + w * path.values[i + 1];
  };
  return DriftFunction(Kind::fbm_sample, std::move(name), std::move(fn));
}

DriftFunction DriftFunction::constant(double value) {
  return DriftFunction(Kind::constant, "constant(" + fmt(value) + ")",
                       [value](double) { return value; }, /*monotone=*/true);
}

DriftFunction DriftFunction::custom(std::string name, std::function<double(double)> fn) {
  return DriftFunction(Kind::custom, std::move(name), std::move(fn));
}

double DriftFunction::operator()(double t) const {
  if (t < 0) throw std::domain_error("drift: t < 0");
  return fn_(t);
}

IncrementDiagnostic increment_exponent(const DriftFunction& f, double t,
                                       const std::vector<double>& h_scales) {
  if (h_scales.size() < 2)
    throw std::invalid_argument("increment_exponent: need at least two scales");
  for (std::size_t i = 0; i < h_scales.size(); ++i) {
    if (h_scales[i] < std::ldexp(1.0, -40))
      throw std::invalid_argument("increment_exponent: scale below 2^-40");
    if (i > 0 && !(h_scales[i] < h_scales[i - 1]))
      throw std::invalid_argument("increment_exponent: scales not strictly decreasing");
  }

  IncrementDiagnostic diag;
  diag.scales = h_scales;
  diag.ratios.reserve(h_scales.size());
  const double f_t = f(t);
  for (double h : h_scales) diag.ratios.push_back((f(t + h) - f_t) / std::sqrt(h));

  const auto& r = diag.ratios;
  const std::size_t half = r.size() / 2;
  bool nondecr = true, nonincr = true;
  double max_abs = 0.0, min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = half; i < r.size(); ++i) {
    if (i > half) {
      nondecr = nondecr && r[i] >= r[i - 1];
      nonincr = nonincr && r[i] <= r[i - 1];
    }
    max_abs = std::max(max_abs, std::fabs(r[i]));
    min_abs = std::min(min_abs, std::fabs(r[i]));
  }

  if (nondecr && r.back() > 0 && r.back() > 10.0 * r.front())
    diag.classification = IncrementClass::diverges_plus;
  else if (nonincr && r.back() < 0 && r.back() < 10.0 * r.front())
    diag.classification = IncrementClass::diverges_minus;
  else if (max_abs <= 10.0 * min_abs || max_abs == 0.0)
    diag.classification = IncrementClass::bounded;
  else
    diag.classification = IncrementClass::inconclusive;
  return diag;
}

LoudDescentResult loud_descent_check(const LoudParams& params, double t, int m) {
  if (m < 1 || m > params.term_count)
    throw std::invalid_argument("loud_descent_check: m outside [1, term_count]");
  const double y = std::ldexp(t, 2 * params.A * m);
  const long long cell = static_cast<long long>(std::floor(y));
  if (cell % 2 == 0) throw std::invalid_argument("parity precondition");

  // Period-aligned step: scaled by 2^{2Ak} it is an even integer for every
  // k > m, so those terms are exactly unchanged; within the level-m cell it
  // moves along the descending branch of the triangle wave.
  const double step = std::ldexp(1.0, 1 - 2 * params.A * (m + 1));
  const double g_t = loud_eval(params, t);
  const double gm_t = loud_term(params, m, t);
  const double half = std::exp2(-2.0 * params.A * params.alpha * m - 1.0);

  LoudDescentResult res;
  res.g_at_t = g_t;
  if (gm_t >= half) {
    res.descending_branch = true;
    res.g_at_side = loud_eval(params, t + step);
    res.pass = res.g_at_side < g_t;
  } else {
    res.descending_branch = false;
    res.g_at_side = loud_eval(params, t - step);
    res.pass = res.g_at_side > g_t;
  }
  return res;
}

double grid_modulus(const DriftFunction& f, double lo, double hi, int grid_depth) {
  if (!(lo <= hi)) throw std::invalid_argument("grid_modulus: empty interval");
  if (grid_depth < 0 || grid_depth > 26) throw std::invalid_argument("grid_modulus: bad depth");
  const std::size_t n = std::size_t{1} << grid_depth;
  double best = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    best = std::max(best, std::fabs(f(t)));
  }
  return best;
}

}  // namespace dz
