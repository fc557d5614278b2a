#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "driftzero/brownian.hpp"
#include "driftzero/cantor.hpp"

namespace dz {

/// Declared Holder modulus |f(t)-f(s)| <= C |t-s|^alpha.
struct HolderSpec {
  double alpha;
  double C;
};

/// Parameters of the Loud construction g = sum_{k=1}^K g_k,
/// g_k(t) = 2^{-2 A alpha k} g_0(2^{2 A k} t), with the triangle wave g_0
/// (0 at even integers, 1 at odd integers, linear between).
/// Standing condition 2A(1-alpha) > 1 is enforced at construction.
struct LoudParams {
  double alpha;
  int A;
  int term_count;

  LoudParams(double alpha_, int A_, int term_count_);
};

/// Piecewise drift realizing a singleton zero set with positive probability:
/// -c t^{1/3} on [0, delta], linear bridge on [delta, q1], the Cantor function
/// (base [1,2]) on [q1, q2], slope-1 linear tail beyond q2.
struct SingletonDriftParams {
  double c;
  double delta, q1, q2;
  GammaParam gamma;
  double epsilon;

  SingletonDriftParams(double c_, double delta_, double q1_, double q2_, GammaParam gamma_,
                       double epsilon_);
};

/// Catalog entry: a continuous function on [0, inf), evaluatable anywhere,
/// with optional declared Holder metadata.
class DriftFunction {
 public:
  enum class Kind {
    cantor,
    cascade,
    loud,
    singleton_piecewise,
    linear,
    cube_root,
    fbm_sample,
    constant,
    custom
  };

  static DriftFunction cantor(GammaParam gamma, double base_lo = 1.0, double base_hi = 2.0);
  static DriftFunction cascade(GammaParam gamma);
  static DriftFunction loud(const LoudParams& params);
  static DriftFunction singleton_piecewise(const SingletonDriftParams& params);
  static DriftFunction linear(double slope, double intercept = 0.0);
  static DriftFunction cube_root(double coefficient);  // f(t) = coefficient * t^(1/3)
  static DriftFunction fbm_sample(SampledPath path, double hurst);  // linear interpolation
  static DriftFunction constant(double value);
  static DriftFunction custom(std::string name, std::function<double(double)> fn);

  /// Function value at t >= 0. Throws std::domain_error for t < 0.
  double operator()(double t) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::optional<HolderSpec>& declared_holder() const { return holder_; }
  void declare_holder(HolderSpec h) { holder_ = h; }
  /// Nondecreasing or nonincreasing on [0, inf); lets interval variation be
  /// read off the endpoint values exactly.
  bool monotone() const { return monotone_; }

 private:
  DriftFunction(Kind kind, std::string name, std::function<double(double)> fn,
                bool monotone = false)
      : kind_(kind), name_(std::move(name)), fn_(std::move(fn)), monotone_(monotone) {}

  Kind kind_;
  std::string name_;
  std::function<double(double)> fn_;
  std::optional<HolderSpec> holder_;
  bool monotone_ = false;
};

/// Triangle wave g_0 underlying the Loud construction.
double loud_triangle(double t);
/// Truncated Loud series with K terms.
double loud_eval(const LoudParams& params, double t);
/// Single term g_m.
double loud_term(const LoudParams& params, int m, double t);

enum class IncrementClass { diverges_plus, diverges_minus, bounded, inconclusive };

/// Ratios r(h) = (f(t+h)-f(t)) / sqrt(h) over a decreasing grid of scales,
/// classified by trend (the local version of the sets A_f^+/-).
struct IncrementDiagnostic {
  std::vector<double> scales;
  std::vector<double> ratios;
  IncrementClass classification;
};

IncrementDiagnostic increment_exponent(const DriftFunction& f, double t,
                                       const std::vector<double>& h_scales);

/// One descent/ascent step of the Loud function at scale m. Requires the
/// parity precondition floor(2^{2Am} t) odd. Uses the period-aligned step
/// 2^{1-2A(m+1)} so that every term with k > m is exactly unchanged.
struct LoudDescentResult {
  bool pass;
  bool descending_branch;  // true: asserted g(t + step) < g(t)
  double g_at_t;
  double g_at_side;
};

LoudDescentResult loud_descent_check(const LoudParams& params, double t, int m);

/// Max |f| over a uniform audit grid (used for modulus budgets).
double grid_modulus(const DriftFunction& f, double lo, double hi, int grid_depth);

}  // namespace dz
