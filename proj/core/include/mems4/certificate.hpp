#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mems4/polynomial.hpp"

namespace mems4 {

enum class CertStatus { verified, falsified, inconclusive };

std::string to_string(CertStatus s);
CertStatus cert_status_from_string(std::string_view s);

/// Aggregation order: falsified dominates inconclusive dominates verified.
CertStatus combine(CertStatus a, CertStatus b);

enum class Direction { nonnegative, positive };

/// What a certificate asserts. For polynomial claims `polynomial` holds the
/// reduced form in `variable` and the assertion is
///   polynomial(x) >= 0 (or > 0) for x in the interval.
struct Claim {
  std::string statement;
  std::string expression;
  std::string variable = "x";
  /// How the reduced form was obtained from the original statement.
  std::string reduction;
  Rational lo = 0;
  Rational hi = 1;
  bool closed = false;
  Direction direction = Direction::nonnegative;
  std::optional<RationalPolynomial> polynomial;
};

/// One auditable step. `values` and `counts` are interpreted per kind:
///   square_free  poly = square-free part
///   sturm        counts = {V(lo), V(hi), roots in the open interval}
///   root_exact   values = {x}
///   root_cell    values = {lo, hi}
///   sample       values = {x, p(x)}
///   endpoint     values = {x, p(x)}
///   exact_value  values = {computed, expected}
///   comparison   values = {lhs, rhs}, counts = {holds}
///   note         free text only
struct TrailStep {
  std::string kind;
  std::string note;
  std::vector<Rational> values;
  std::vector<long> counts;
  std::optional<RationalPolynomial> poly;
};

struct Certificate {
  std::string id;
  Claim claim;
  CertStatus status = CertStatus::inconclusive;
  std::optional<Rational> witness;
  std::vector<TrailStep> trail;
  std::vector<std::string> notes;
  /// Sub-claims; the status of a composite is the combination of its parts
  /// and its own trail.
  std::vector<Certificate> parts;
};

inline constexpr int kCertificateSchemaVersion = 1;

std::string to_json(const Certificate& c, int indent = 2);
Certificate certificate_from_json(std::string_view text);

struct ReplayResult {
  bool ok = false;
  std::string reason;
};

/// Re-derives the status of `c` from its claim and trail alone: recomputes
/// square-free part and Sturm counts, checks every recorded root cell,
/// sample, endpoint and exact value, and confirms a falsifying witness
/// violates the claim exactly. Parts are replayed recursively.
ReplayResult replay(const Certificate& c);

}  // namespace mems4
