#include "driftzero/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dz {

double std_normal_cdf(double x) {
  if (std::isnan(x)) throw std::invalid_argument("std_normal_cdf: NaN argument");
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

namespace {

// Gauss-Legendre abscissae/weights used by the Genz bivariate normal
// quadrature (6/12/20 point rules, selected by |rho|).
const double kGlW[3][10] = {
    {0.1713244923791705, 0.3607615730481384, 0.4679139345726904, 0, 0, 0, 0, 0, 0, 0},
    {0.04717533638651177, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659,
     0.2334925365383547, 0.2491470458134029, 0, 0, 0, 0},
    {0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
     0.1019301198172404, 0.1181945319615184, 0.1316886384491766, 0.1420961093183821,
     0.1491729864726037, 0.1527533871307259}};
const double kGlX[3][10] = {
    {0.9324695142031522, 0.6612093864662647, 0.2386191860831970, 0, 0, 0, 0, 0, 0, 0},
    {0.9815606342467191, 0.9041172563704750, 0.7699026741943050, 0.5873179542866171,
     0.3678314989981802, 0.1252334085114692, 0, 0, 0, 0},
    {0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
     0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
     0.2277858511416451, 0.07652652113349733}};

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

double bivariate_upper_prob(double dh, double dk, double r) {
  const double inf = std::numeric_limits<double>::infinity();
  if (dh == inf || dk == inf) return 0.0;
  if (dh == -inf) return std_normal_cdf(-dk);
  if (dk == -inf) return std_normal_cdf(-dh);

  int ng;
  if (std::fabs(r) < 0.3)
    ng = 0;
  else if (std::fabs(r) < 0.75)
    ng = 1;
  else
    ng = 2;
  const int lg = (ng == 0) ? 3 : (ng == 1) ? 6 : 10;

  double h = dh, k = dk, hk = h * k, bvn = 0.0;
  if (std::fabs(r) < 0.925) {
    if (std::fabs(r) > 0) {
      const double hs = (h * h + k * k) / 2;
      const double asr = std::asin(r);
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double sn = std::sin(asr * (is * kGlX[ng][i] + 1) / 2);
          bvn += kGlW[ng][i] * std::exp((sn * hk - hs) / (1 - sn * sn));
        }
      }
      bvn = bvn * asr / (2 * kTwoPi);
    }
    return bvn + std_normal_cdf(-h) * std_normal_cdf(-k);
  }

  // |rho| >= 0.925: Drezner-Wesolowsky expansion around |rho| = 1.
  if (r < 0) {
    k = -k;
    hk = -hk;
  }
  if (std::fabs(r) < 1) {
    const double as = (1 - r) * (1 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4 - hk) / 8;
    const double d = (12 - hk) / 16;
    double asr = -(bs / as + hk) / 2;
    if (asr > -100)
      bvn = a * std::exp(asr) * (1 - c * (bs - as) * (1 - d * bs / 5) / 3 + c * d * as * as / 5);
    if (-hk < 100) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2) * std::sqrt(kTwoPi) * std_normal_cdf(-b / a) * b *
             (1 - c * bs * (1 - d * bs / 5) / 3);
    }
    a /= 2;
    for (int i = 0; i < lg; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        double xs = a * (is * kGlX[ng][i] + 1);
        xs = xs * xs;
        const double rs = std::sqrt(1 - xs);
        asr = -(bs / xs + hk) / 2;
        if (asr > -100)
          bvn += a * kGlW[ng][i] * std::exp(asr) *
                 (std::exp(-hk * (1 - rs) / (2 * (1 + rs))) / rs - (1 + c * xs * (1 + d * xs)));
      }
    }
    bvn = -bvn / kTwoPi;
  }
  if (r > 0) return bvn + std_normal_cdf(-std::max(h, k));
  bvn = -bvn;
  if (k > h) bvn += std_normal_cdf(k) - std_normal_cdf(h);
  return bvn;
}

double bivariate_rect_prob(const BivariateRect& rect) {
  if (std::isnan(rect.rho) || std::fabs(rect.rho) > 1.0)
    throw std::invalid_argument("bivariate_rect_prob: |rho| > 1");
  if (!(rect.x_lo <= rect.x_hi) || !(rect.y_lo <= rect.y_hi))
    throw std::invalid_argument("bivariate_rect_prob: inverted rectangle");

  // Degenerate comonotone/antimonotone cases reduce to one dimension.
  if (rect.rho == 1.0) {
    const double lo = std::max(rect.x_lo, rect.y_lo);
    const double hi = std::min(rect.x_hi, rect.y_hi);
    return (lo < hi) ? std_normal_cdf(hi) - std_normal_cdf(lo) : 0.0;
  }
  if (rect.rho == -1.0) {
    const double lo = std::max(rect.x_lo, -rect.y_hi);
    const double hi = std::min(rect.x_hi, -rect.y_lo);
    return (lo < hi) ? std_normal_cdf(hi) - std_normal_cdf(lo) : 0.0;
  }

  const double p = bivariate_upper_prob(rect.x_lo, rect.y_lo, rect.rho) -
                   bivariate_upper_prob(rect.x_hi, rect.y_lo, rect.rho) -
                   bivariate_upper_prob(rect.x_lo, rect.y_hi, rect.rho) +
                   bivariate_upper_prob(rect.x_hi, rect.y_hi, rect.rho);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace dz
