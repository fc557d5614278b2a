#include "driftzero/cantor.hpp"

#include <cmath>
#include <stdexcept>

namespace dz {

GammaParam::GammaParam(double g) : gamma(g) {
  if (!(g > 0.0 && g < 0.5)) throw std::invalid_argument("GammaParam: gamma outside (0, 1/2)");
}

GammaRegime GammaParam::regime() const {
  if (gamma < 0.25) return GammaRegime::subcritical;
  if (gamma == 0.25) return GammaRegime::critical;
  return GammaRegime::supercritical;
}

double CantorAddress::left_endpoint(double gamma) const {
  // a + (b-a) * sum over 1-digits i of (1-gamma) * gamma^(i-1)
  double acc = 0.0, scale = 1.0;
  for (int i = 1; i <= level; ++i) {
    if (digit(i) == 1) acc += (1.0 - gamma) * scale;
    scale *= gamma;
  }
  return base_lo + (base_hi - base_lo) * acc;
}

double CantorAddress::right_endpoint(double gamma) const {
  return left_endpoint(gamma) + (base_hi - base_lo) * std::pow(gamma, level);
}

std::vector<CantorAddress> enumerate_intervals(const GammaParam& gp, int n, double base_lo,
                                               double base_hi) {
  (void)gp;
  if (n < 1 || n > 30) throw std::invalid_argument("enumerate_intervals: n outside [1,30]");
  std::vector<CantorAddress> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w)
    out.push_back({w, n, base_lo, base_hi});
  return out;
}

double DyadicValue::to_double() const {
  return std::ldexp(static_cast<double>(numerator), -exponent);
}

std::pair<DyadicValue, DyadicValue> cantor_value_at_endpoints(const CantorAddress& addr) {
  if (addr.level < 0 || addr.level > 52)
    throw std::invalid_argument("cantor_value_at_endpoints: level outside [0,52]");
  // The word read as a binary fraction is exactly f(left endpoint).
  DyadicValue left{addr.bits, addr.level};
  DyadicValue right{addr.bits + 1, addr.level};
  return {left, right};
}

double eval_cantor(const GammaParam& gp, double t, double base_lo, double base_hi, int depth) {
  if (t <= base_lo) return 0.0;
  if (t >= base_hi) return 1.0;
  const double g = gp.gamma;
  double u = (t - base_lo) / (base_hi - base_lo);
  double value = 0.0, scale = 0.5;
  for (int d = 0; d < depth; ++d) {
    if (u >= g && u <= 1.0 - g) return value + scale;  // gap plateau, exact
    if (u < g) {
      u /= g;
    } else {
      value += scale;
      u = (u - (1.0 - g)) / g;
    }
    scale *= 0.5;
  }
  return value;
}

bool classify_balanced(const CantorAddress& addr) {
  if (addr.level < 1) throw std::invalid_argument("classify_balanced: level < 1");
  int zeros = 0;
  for (int i = 1; i <= addr.level; ++i) zeros += (addr.digit(i) == 0);
  const int threshold = (addr.level + 2) / 3;  // ceil(n/3)
  return zeros >= threshold;
}

std::uint64_t count_unbalanced(int n) {
  if (n < 1 || n > 60) throw std::invalid_argument("count_unbalanced: n outside [1,60]");
  const int threshold = (n + 2) / 3;  // words with fewer than ceil(n/3) zeros
  std::uint64_t sum = 0, binom = 1;   // binom = C(n,k)
  for (int k = 0; k < threshold; ++k) {
    sum += binom;
    binom = binom * static_cast<std::uint64_t>(n - k) / static_cast<std::uint64_t>(k + 1);
  }
  return sum;
}

DigitStream DigitStream::from_dyadic(DyadicValue v) {
  if (v.exponent < 0 || v.exponent > 63 || v.numerator > (std::uint64_t{1} << v.exponent))
    throw std::invalid_argument("DigitStream: bad dyadic value");
  DigitStream s;
  s.kind = Kind::dyadic;
  s.dyadic = v;
  return s;
}

DigitStream DigitStream::from_periodic(std::vector<int> preperiod, std::vector<int> period) {
  if (period.empty()) throw std::invalid_argument("DigitStream: empty period");
  DigitStream s;
  s.kind = Kind::periodic;
  s.preperiod = std::move(preperiod);
  s.period = std::move(period);
  return s;
}

DigitStream DigitStream::from_digits(std::vector<int> digits) {
  DigitStream s;
  s.kind = Kind::finite;
  s.preperiod = std::move(digits);
  return s;
}

int DigitStream::digit(std::size_t i) const {
  switch (kind) {
    case Kind::dyadic:
      if (i > static_cast<std::size_t>(dyadic.exponent)) return 0;
      return static_cast<int>((dyadic.numerator >> (dyadic.exponent - static_cast<int>(i))) & 1u);
    case Kind::periodic:
      if (i <= preperiod.size()) return preperiod[i - 1];
      return period[(i - 1 - preperiod.size()) % period.size()];
    case Kind::finite:
      return (i <= preperiod.size()) ? preperiod[i - 1] : 0;
  }
  return 0;
}

bool DigitStream::has_digit(std::size_t i) const {
  return kind != Kind::finite || i <= preperiod.size();
}

namespace {

// Tail fraction 0.d_{n+1} d_{n+2} ... as an interval [lo, lo + width]: known
// digits pin lo, `width` is the weight of unknown or truncated digits
// (~2^-64 for complete streams, larger for finite truncations).
struct TailRange {
  double lo;
  double width;
};

TailRange tail_fraction(const DigitStream& s, int n) {
  double tail = 0.0, w = 0.5;
  for (int j = 1; j <= 64; ++j) {
    const std::size_t idx = static_cast<std::size_t>(n) + j;
    if (s.kind == DigitStream::Kind::finite && !s.has_digit(idx)) return {tail, 2.0 * w};
    if (s.digit(idx)) tail += w;
    w *= 0.5;
  }
  return {tail, 2.0 * w};
}

}  // namespace

Membership in_exclusion_set(const DigitStream& value, const ExclusionParams& params,
                            double gamma) {
  if (!(gamma < params.gamma1 && params.gamma1 < 0.25))
    throw std::invalid_argument("in_exclusion_set: need gamma < gamma1 < 1/4");
  if (params.n0 < 1 || params.digit_budget < params.n0)
    throw std::invalid_argument("in_exclusion_set: digit_budget < n0");

  const double q = 2.0 * std::sqrt(params.gamma1);  // threshold in tail units: q^n / 2
  constexpr double kMargin = 1e-12;

  if (value.kind == DigitStream::Kind::dyadic) {
    const int m = value.dyadic.exponent;
    if (params.digit_budget >= std::max(params.n0, m)) return Membership::member;
  }

  // Decide how deep explicit levels must be scanned. Periodic tails repeat
  // after the preperiod, so one full cycle past max(budget, preperiod) covers
  // every distinct tail.
  int scan_to = params.digit_budget;
  if (value.kind == DigitStream::Kind::periodic)
    scan_to = std::max<int>(scan_to, static_cast<int>(value.preperiod.size() + value.period.size()));
  if (value.kind == DigitStream::Kind::finite)
    scan_to = std::min<int>(scan_to, static_cast<int>(value.preperiod.size()));

  bool ambiguous = false;
  bool deep_hit = false;  // membership at a level beyond the budget
  double threshold = std::pow(q, params.n0) / 2.0;
  for (int n = params.n0; n <= scan_to; ++n, threshold *= q) {
    const TailRange range = tail_fraction(value, n);
    const double lo = range.lo, hi = range.lo + range.width;
    // Certified hit: every possible tail sits within the band around 0 or 1.
    const bool hit = (hi <= threshold - kMargin) || (1.0 - lo <= threshold - kMargin);
    // Certified miss: no possible tail reaches either band.
    const bool miss = (lo > threshold + kMargin) && (1.0 - hi > threshold + kMargin);
    if (hit) {
      if (n <= params.digit_budget) return Membership::member;
      deep_hit = true;
    } else if (!miss) {
      ambiguous = true;
    }
  }
  if (deep_hit || ambiguous) return Membership::undecided;

  switch (value.kind) {
    case DigitStream::Kind::dyadic:
      // Exact dyadic deeper than the budget: distance 0 at level exponent,
      // which the budget did not reach.
      return (value.dyadic.exponent > params.digit_budget && value.dyadic.numerator != 0 &&
              value.dyadic.numerator != (std::uint64_t{1} << value.dyadic.exponent))
                 ? Membership::undecided
                 : Membership::non_member;
    case DigitStream::Kind::periodic: {
      // Tails repeat with the period; the minimal tail distance bounds every
      // deeper level, while the threshold keeps decaying geometrically.
      double d_min = 2.0;
      const int q_len = static_cast<int>(value.preperiod.size());
      const int p_len = static_cast<int>(value.period.size());
      for (int n = q_len; n < q_len + p_len; ++n) {
        const TailRange range = tail_fraction(value, n);
        d_min = std::min(d_min, std::min(range.lo, 1.0 - range.lo - range.width));
      }
      const double deep_threshold = std::pow(q, scan_to + 1) / 2.0;
      return (deep_threshold < d_min - kMargin) ? Membership::non_member : Membership::undecided;
    }
    case DigitStream::Kind::finite:
      return Membership::undecided;  // no deeper certification possible
  }
  return Membership::undecided;
}

}  // namespace dz
