#pragma once

#include "driftzero/rng.hpp"

namespace dz {

/// Standard normal CDF. Accepts +-infinity; throws std::invalid_argument on NaN.
double std_normal_cdf(double x);

/// Axis-aligned rectangle for the standard bivariate normal law with
/// correlation rho. Infinite bounds express one-sided events.
struct BivariateRect {
  double x_lo, x_hi;
  double y_lo, y_hi;
  double rho;
};

/// P((X,Y) in rect) for standard bivariate normal with correlation rect.rho.
/// Absolute error <= 1e-8 (Genz/Drezner-Wesolowsky quadrature).
/// Throws std::invalid_argument for |rho| > 1 or an empty/inverted rectangle.
double bivariate_rect_prob(const BivariateRect& rect);

/// Upper orthant helper: P(X > h, Y > k) with correlation rho.
double bivariate_upper_prob(double h, double k, double rho);

}  // namespace dz
