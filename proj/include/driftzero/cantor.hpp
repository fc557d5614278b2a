#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace dz {

enum class GammaRegime { subcritical, critical, supercritical };

/// Ratio parameter of the middle-(1-2*gamma) Cantor set, 0 < gamma < 1/2.
/// The regime split at 1/4 is the Holder-1/2 threshold of the Cantor function.
struct GammaParam {
  double gamma;

  explicit GammaParam(double g);
  GammaRegime regime() const;
};

/// A level-n interval of the Cantor construction, identified by its binary
/// word (0 = left child, 1 = right child) over a base interval [lo, hi].
/// The word is stored MSB-first in `bits`: digit i (1-based) is bit
/// (level - i) of `bits`.
struct CantorAddress {
  std::uint64_t bits = 0;
  int level = 0;
  double base_lo = 1.0;
  double base_hi = 2.0;

  int digit(int i) const { return static_cast<int>((bits >> (level - i)) & 1u); }
  double left_endpoint(double gamma) const;
  double right_endpoint(double gamma) const;  // left + gamma^level * (hi - lo)
};

/// All 2^n level-n intervals in increasing spatial order (binary counting
/// order of the words). 1 <= n <= 30.
std::vector<CantorAddress> enumerate_intervals(const GammaParam& gp, int n,
                                               double base_lo = 1.0, double base_hi = 2.0);

/// Exact dyadic rational numerator / 2^exponent in [0,1].
struct DyadicValue {
  std::uint64_t numerator = 0;
  int exponent = 0;

  double to_double() const;
};

/// Cantor-function values at the two endpoints of the addressed interval:
/// f(left) = sum over 1-digits i of 2^-i (= word read as a binary fraction),
/// f(right) = f(left) + 2^-n. Exact; level <= 52.
std::pair<DyadicValue, DyadicValue> cantor_value_at_endpoints(const CantorAddress& addr);

/// Cantor function f_gamma on base [lo, hi], extended by 0 to the left and 1
/// to the right. Exact on gap plateaus and endpoints; elsewhere within
/// 2^-depth of the limit function.
double eval_cantor(const GammaParam& gp, double t, double base_lo = 1.0, double base_hi = 2.0,
                   int depth = 48);

/// Critical-regime (gamma = 1/4) classification: an address is balanced when
/// its word contains at least n/3 zero digits (>= ceil(n/3) over integers).
bool classify_balanced(const CantorAddress& addr);

/// Number of unbalanced level-n words: sum_{k < ceil(n/3)} C(n,k), exact.
/// 1 <= n <= 60.
std::uint64_t count_unbalanced(int n);

/// Binary-digit stream for exclusion-set membership queries. Three kinds:
/// exact dyadic values, eventually periodic expansions, finite truncations.
struct DigitStream {
  enum class Kind { dyadic, periodic, finite };
  Kind kind = Kind::finite;
  DyadicValue dyadic;             // kind == dyadic
  std::vector<int> preperiod;     // kind == periodic/finite: leading digits
  std::vector<int> period;        // kind == periodic: repeating block

  static DigitStream from_dyadic(DyadicValue v);
  static DigitStream from_periodic(std::vector<int> preperiod, std::vector<int> period);
  static DigitStream from_digits(std::vector<int> digits);

  /// Digit d_i (1-based) of the binary expansion 0.d_1 d_2 ...
  int digit(std::size_t i) const;
  /// Whether digits are defined past index i.
  bool has_digit(std::size_t i) const;
};

enum class Membership { member, non_member, undecided };

/// Parameters of the dyadic exclusion set M_{n0}: levels n >= n0 exclude a
/// band of half-width gamma1^{n/2}/2 around each multiple of 2^-n.
struct ExclusionParams {
  double gamma1;
  int n0;
  int digit_budget;
};

/// Tri-state membership of a value in the exclusion set. `gamma` is the
/// ambient Cantor ratio; requires gamma < gamma1 < 1/4.
Membership in_exclusion_set(const DigitStream& value, const ExclusionParams& params,
                            double gamma);

}  // namespace dz
