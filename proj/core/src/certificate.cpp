#include "mems4/certificate.hpp"

#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mems4 {

using nlohmann::ordered_json;

std::string to_string(CertStatus s) {
  switch (s) {
    case CertStatus::verified: return "verified";
    case CertStatus::falsified: return "falsified";
    case CertStatus::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

CertStatus cert_status_from_string(std::string_view s) {
  if (s == "verified") return CertStatus::verified;
  if (s == "falsified") return CertStatus::falsified;
  if (s == "inconclusive") return CertStatus::inconclusive;
  throw std::invalid_argument("unknown certificate status: " + std::string(s));
}

CertStatus combine(CertStatus a, CertStatus b) {
  if (a == CertStatus::falsified || b == CertStatus::falsified) return CertStatus::falsified;
  if (a == CertStatus::inconclusive || b == CertStatus::inconclusive) return CertStatus::inconclusive;
  return CertStatus::verified;
}

namespace {

ordered_json rationals(const std::vector<Rational>& v) {
  ordered_json a = ordered_json::array();
  for (const auto& q : v) a.push_back(fraction_string(q));
  return a;
}

std::vector<Rational> parse_rationals(const ordered_json& a) {
  std::vector<Rational> v;
  for (const auto& x : a) v.push_back(parse_fraction_string(x.get<std::string>()));
  return v;
}

ordered_json claim_json(const Claim& c) {
  ordered_json j;
  j["statement"] = c.statement;
  j["expression"] = c.expression;
  j["variable"] = c.variable;
  j["reduction"] = c.reduction;
  j["domain"] = {{"lo", fraction_string(c.lo)}, {"hi", fraction_string(c.hi)}, {"closed", c.closed}};
  j["direction"] = c.direction == Direction::positive ? ">0" : ">=0";
  if (c.polynomial) j["polynomial"] = rationals(c.polynomial->coefficients());
  return j;
}

Claim claim_from(const ordered_json& j) {
  Claim c;
  c.statement = j.at("statement").get<std::string>();
  c.expression = j.at("expression").get<std::string>();
  c.variable = j.at("variable").get<std::string>();
  c.reduction = j.at("reduction").get<std::string>();
  c.lo = parse_fraction_string(j.at("domain").at("lo").get<std::string>());
  c.hi = parse_fraction_string(j.at("domain").at("hi").get<std::string>());
  c.closed = j.at("domain").at("closed").get<bool>();
  c.direction = j.at("direction").get<std::string>() == ">0" ? Direction::positive : Direction::nonnegative;
  if (j.contains("polynomial")) c.polynomial = RationalPolynomial(parse_rationals(j.at("polynomial")));
  return c;
}

ordered_json cert_json(const Certificate& c, bool top) {
  ordered_json j;
  if (top) j["schema_version"] = kCertificateSchemaVersion;
  j["id"] = c.id;
  j["claim"] = claim_json(c.claim);
  j["status"] = to_string(c.status);
  j["witness"] = c.witness ? ordered_json(fraction_string(*c.witness)) : ordered_json(nullptr);
  j["notes"] = c.notes;
  ordered_json trail = ordered_json::array();
  for (const auto& s : c.trail) {
    ordered_json t;
    t["kind"] = s.kind;
    if (!s.note.empty()) t["note"] = s.note;
    if (!s.values.empty()) t["values"] = rationals(s.values);
    if (!s.counts.empty()) t["counts"] = s.counts;
    if (s.poly) t["poly"] = rationals(s.poly->coefficients());
    trail.push_back(std::move(t));
  }
  j["trail"] = std::move(trail);
  ordered_json parts = ordered_json::array();
  for (const auto& p : c.parts) parts.push_back(cert_json(p, false));
  j["parts"] = std::move(parts);
  return j;
}

Certificate cert_from(const ordered_json& j) {
  Certificate c;
  c.id = j.at("id").get<std::string>();
  c.claim = claim_from(j.at("claim"));
  c.status = cert_status_from_string(j.at("status").get<std::string>());
  if (!j.at("witness").is_null()) c.witness = parse_fraction_string(j.at("witness").get<std::string>());
  c.notes = j.at("notes").get<std::vector<std::string>>();
  for (const auto& t : j.at("trail")) {
    TrailStep s;
    s.kind = t.at("kind").get<std::string>();
    if (t.contains("note")) s.note = t.at("note").get<std::string>();
    if (t.contains("values")) s.values = parse_rationals(t.at("values"));
    if (t.contains("counts")) s.counts = t.at("counts").get<std::vector<long>>();
    if (t.contains("poly")) s.poly = RationalPolynomial(parse_rationals(t.at("poly")));
    c.trail.push_back(std::move(s));
  }
  for (const auto& p : j.at("parts")) c.parts.push_back(cert_from(p));
  return c;
}

}  // namespace

std::string to_json(const Certificate& c, int indent) { return cert_json(c, true).dump(indent); }

Certificate certificate_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kCertificateSchemaVersion) {
      throw std::invalid_argument("unsupported certificate schema version");
    }
    return cert_from(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed certificate: ") + e.what());
  }
}

namespace {

bool satisfies(const Rational& v, Direction d) { return d == Direction::positive ? v > 0 : v >= 0; }

bool in_domain(const Claim& c, const Rational& x) {
  return c.closed ? (c.lo <= x && x <= c.hi) : (c.lo < x && x < c.hi);
}

ReplayResult fail(std::string why) { return {false, std::move(why)}; }

// Status implied by a polynomial claim's trail, or an error.
ReplayResult replay_polynomial(const Certificate& c, CertStatus& derived) {
  const auto& claim = c.claim;
  const RationalPolynomial& p = *claim.polynomial;

  if (c.status == CertStatus::falsified) {
    if (!c.witness) return fail("falsified without witness");
    if (!in_domain(claim, *c.witness)) return fail("witness outside the domain");
    if (satisfies(p(*c.witness), claim.direction)) return fail("witness does not violate the claim");
    derived = CertStatus::falsified;
    return {true, ""};
  }

  // Every recorded sample must re-evaluate to the recorded value.
  for (const auto& s : c.trail) {
    if ((s.kind == "sample" || s.kind == "endpoint") &&
        (s.values.size() != 2 || p(s.values[0]) != s.values[1])) {
      return fail("recorded evaluation does not re-evaluate");
    }
  }
  if (c.status == CertStatus::inconclusive) {
    for (const auto& s : c.trail) {
      if (s.kind == "sample" && !satisfies(s.values[1], claim.direction)) {
        return fail("inconclusive certificate hides a violating sample");
      }
    }
    derived = CertStatus::inconclusive;
    return {true, ""};
  }

  if (p.is_zero()) {
    if (claim.direction == Direction::positive) return fail("zero polynomial cannot be positive");
    derived = CertStatus::verified;
    return {true, ""};
  }

  const RationalPolynomial q = square_free_part(p);
  const SturmSequence sturm(q);
  std::vector<RootCell> roots;
  std::vector<std::pair<Rational, Rational>> samples;
  std::vector<std::pair<Rational, Rational>> endpoints;
  bool saw_sf = false, saw_sturm = false;
  for (const auto& s : c.trail) {
    if (s.kind == "square_free") {
      if (!s.poly || !(*s.poly == q)) return fail("square-free part mismatch");
      saw_sf = true;
    } else if (s.kind == "sturm") {
      if (s.counts.size() != 3 || s.counts[0] != sturm.variations(claim.lo) ||
          s.counts[1] != sturm.variations(claim.hi) || s.counts[2] != sturm.count_open(claim.lo, claim.hi)) {
        return fail("Sturm counts mismatch");
      }
      saw_sturm = true;
    } else if (s.kind == "root_exact") {
      if (s.values.size() != 1 || q(s.values[0]) != 0) return fail("recorded exact root is not a root");
      roots.push_back({s.values[0], s.values[0], true});
    } else if (s.kind == "root_cell") {
      if (s.values.size() != 2 || sturm.count_open(s.values[0], s.values[1]) != 1) {
        return fail("root cell does not hold exactly one root");
      }
      roots.push_back({s.values[0], s.values[1], false});
    } else if (s.kind == "sample") {
      samples.emplace_back(s.values[0], s.values[1]);
    } else if (s.kind == "endpoint") {
      endpoints.emplace_back(s.values[0], s.values[1]);
    }
  }
  if (!saw_sf || !saw_sturm) return fail("trail lacks square-free part or Sturm counts");
  if (static_cast<long>(roots.size()) != sturm.count_open(claim.lo, claim.hi)) return fail("roots unaccounted for");
  if (claim.direction == Direction::positive && !roots.empty()) return fail("positive claim with interior roots");

  // Root cells sorted and separated; one sample strictly inside each gap.
  Rational prev = claim.lo;
  if (samples.size() != roots.size() + 1) return fail("expected one sample per gap");
  for (std::size_t k = 0; k <= roots.size(); ++k) {
    const Rational next = k < roots.size() ? roots[k].lo : claim.hi;
    const Rational& x = samples[k].first;
    if (!(prev < x && x < next)) return fail("sample not strictly inside its gap");
    if (!satisfies(samples[k].second, claim.direction)) return fail("sample violates the claim");
    if (k < roots.size()) {
      if (!(roots[k].lo > prev) || roots[k].hi >= (k + 1 < roots.size() ? roots[k + 1].lo : claim.hi)) {
        return fail("root cells not separated");
      }
      prev = roots[k].hi;
    }
  }
  if (claim.closed) {
    bool lo_ok = false, hi_ok = false;
    for (const auto& [x, v] : endpoints) {
      if (x == claim.lo && satisfies(v, claim.direction)) lo_ok = true;
      if (x == claim.hi && satisfies(v, claim.direction)) hi_ok = true;
    }
    if (!lo_ok || !hi_ok) return fail("closed interval endpoints not established");
  }
  derived = CertStatus::verified;
  return {true, ""};
}

}  // namespace

ReplayResult replay(const Certificate& c) {
  CertStatus own = CertStatus::verified;
  if (c.claim.polynomial) {
    auto r = replay_polynomial(c, own);
    if (!r.ok) return {false, c.id + ": " + r.reason};
  } else {
    for (const auto& s : c.trail) {
      if (s.kind == "exact_value") {
        if (s.values.size() != 2) return {false, c.id + ": malformed exact_value"};
        if (s.values[0] != s.values[1]) own = CertStatus::falsified;
      } else if (s.kind == "comparison") {
        if (s.values.size() != 2 || s.counts.size() != 1) return {false, c.id + ": malformed comparison"};
        const bool holds = s.values[0] <= s.values[1];
        if (holds != (s.counts[0] != 0)) return {false, c.id + ": comparison recorded incorrectly"};
      } else if (s.kind == "inconclusive") {
        own = combine(own, CertStatus::inconclusive);
      }
    }
  }
  CertStatus total = own;
  for (const auto& p : c.parts) {
    auto r = replay(p);
    if (!r.ok) return r;
    total = combine(total, p.status);
  }
  if (total != c.status) {
    return {false, c.id + ": recorded status " + to_string(c.status) + " but trail supports " + to_string(total)};
  }
  if (c.status == CertStatus::falsified && !c.witness) return {false, c.id + ": falsified without witness"};
  return {true, ""};
}

}  // namespace mems4
