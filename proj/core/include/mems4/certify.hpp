#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mems4/certificate.hpp"
#include "mems4/closed_forms.hpp"
#include "mems4/polynomial.hpp"
#include "mems4/power_sum.hpp"

namespace mems4 {

inline constexpr int kMaxCertifyDegree = 64;

/// P_N(s) = A - B (9-4s)^2 - C s (9-4s)^2 with
/// A = 25 N^2 (N-4)^2 / 32, B = 8 (3N-2)(3N-8) / 45, C = 12 (N^2-1) / 5.
/// Multiplying
///   25 N^2 (N-4)^2 / (32 (9 r^{4/3} - 4 r^3)^2) - 8 (N-2/3)(N-8/3) / (5 r^{8/3})
///     - 12 (N^2-1) / (5 r)
/// by r^{8/3} (9-4s)^2 > 0 with s = r^{5/3} gives this cubic, so its sign on
/// (0,1) is the sign of that expression.
RationalPolynomial reduce_hjh(Dimension n);

/// Exact sign certificate for p on (lo, hi) (or [lo, hi] when closed):
/// square-free part, Sturm counts, isolated roots, one exact sample in each
/// gap between consecutive roots and, for closed intervals, both endpoints.
/// Throws std::invalid_argument when deg p > kMaxCertifyDegree.
Certificate certify_nonneg(const RationalPolynomial& p, bool closed = false, const Rational& lo = 0,
                           const Rational& hi = 1, Direction direction = Direction::nonnegative);

/// Runs the procedure for an already filled-in polynomial claim.
Certificate certify_claim(Claim claim, std::string id = {});

struct PowerSumClaimOptions {
  /// Exact sample count for the fallback when the substituted degree exceeds
  /// kMaxCertifyDegree. The fallback never returns verified.
  std::size_t samples = 10000;
  /// When false the fallback only confirms the prescan's most negative
  /// points exactly instead of all samples.
  bool dense = true;
};

/// Certifies f(r) >= 0 (or > 0) for r in (0,1) (or [0,1]) for a power sum
/// with rational exponents: multiplies by r^k to clear negative exponents,
/// substitutes t = r^{1/q} with q the lcm of the exponent denominators, and
/// certifies the resulting polynomial in t on the same interval.
Certificate certify_power_sum(const PowerSum& f, const std::string& statement, bool closed = false,
                              Direction direction = Direction::nonnegative, const PowerSumClaimOptions& opts = {});

/// P_N >= 0 on (0,1).
Certificate certify_hjh(Dimension n);

struct ThresholdRow {
  int n = 0;
  Rational classical_lower;
  Rational lambda_bar;
  Rational hardy;
  Rational half_hardy;
  Rational two_lambda_bar;
  Rational twentyseven_lambda_bar;
  /// 2 lambda_bar <= H_N
  bool regular_threshold = false;
  /// 27 lambda_bar <= H_N / 2
  bool hjh_threshold = false;
  /// For lambda_bar <= 0 (N = 1, 2) both comparisons hold vacuously; such
  /// rows are listed but do not enter the onsets.
  bool lambda_bar_positive = false;
};

struct ThresholdTable {
  std::vector<ThresholdRow> rows;
  /// Smallest N such that the comparison holds at every N' >= N in the
  /// range with lambda_bar > 0.
  std::optional<int> onset_regular;
  std::optional<int> onset_hjh;
};

ThresholdTable threshold_table(Dimension n_min, Dimension n_max);

/// Asserts, for every N in the range with lambda_bar > 0, that
/// 2 lambda_bar <= H_N iff N >= 9 and 27 lambda_bar <= H_N / 2 iff N >= 31.
Certificate certify_thresholds(Dimension n_min, Dimension n_max);

/// w_2 = 1 - 3 r^{4/3} + 2 r^2: exact boundary values, the sub-solution
/// inequality Delta^2 w_2 <= 27 lambda_bar/(1-w_2)^2 in its reduced form
/// 3 lambda_bar (9 - (3-2t)^2) >= 0 with t = r^{2/3}, and
/// 1 - w_2 >= r^{4/3} (phi_0 = 2 t^2 - 2 t^3 >= 0).
Certificate certify_w2(Dimension n);

/// sup over s in (0,1) of 125/(9-4s)^3 equals 1: (9-4s)^3 - 125 >= 0 on
/// [0,1], 9 - 4s > 0 there, the derivative 1500/(9-4s)^4 is positive, and
/// the values at s = 0 and s = 1 are 125/729 and 1. Requires n >= 5.
Certificate certify_w3_stability(Dimension n);

}  // namespace mems4
