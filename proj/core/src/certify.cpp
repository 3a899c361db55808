#include "mems4/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mems4 {

RationalPolynomial reduce_hjh(Dimension n) {
  const long N = n.value();
  const Rational A = Rational(25 * N * N * (N - 4) * (N - 4), 32);
  const Rational B = Rational(8 * (3 * N - 2) * (3 * N - 8), 45);
  const Rational C = Rational(12 * (N * N - 1), 5);
  const auto g = RationalPolynomial::linear(9, -4);
  const auto g2 = g * g;
  return RationalPolynomial::constant(A) - B * g2 - C * (RationalPolynomial::monomial(1, 1) * g2);
}

namespace {

TrailStep step(std::string kind, std::vector<Rational> values, std::string note = {}) {
  TrailStep s;
  s.kind = std::move(kind);
  s.values = std::move(values);
  s.note = std::move(note);
  return s;
}

bool satisfies(const Rational& v, Direction d) { return d == Direction::positive ? v > 0 : v >= 0; }

std::string interval_string(const Claim& c) {
  std::ostringstream os;
  os << (c.closed ? "[" : "(") << c.lo.get_str() << ", " << c.hi.get_str() << (c.closed ? "]" : ")");
  return os.str();
}

void falsify(Certificate& cert, const Rational& x, const Rational& value, const std::string& why) {
  cert.status = CertStatus::falsified;
  cert.witness = x;
  cert.trail.push_back(step("sample", {x, value}, why));
}

}  // namespace

Certificate certify_claim(Claim claim, std::string id) {
  if (!claim.polynomial) throw std::invalid_argument("certify_claim needs a polynomial claim");
  const RationalPolynomial p = *claim.polynomial;
  if (p.degree() > kMaxCertifyDegree) {
    throw std::invalid_argument("polynomial degree " + std::to_string(p.degree()) + " exceeds the certification cap");
  }
  if (!(claim.lo < claim.hi)) throw std::invalid_argument("empty certification interval");

  Certificate cert;
  cert.id = std::move(id);
  cert.claim = std::move(claim);
  const Claim& c = cert.claim;
  if (c.expression.empty()) cert.claim.expression = p.to_string(c.variable);
  const Direction dir = c.direction;

  if (p.is_zero()) {
    if (dir == Direction::positive) {
      const Rational mid = (c.lo + c.hi) / 2;
      falsify(cert, mid, 0, "zero polynomial is not positive");
    } else {
      cert.status = CertStatus::verified;
      cert.notes.push_back("degenerate zero polynomial: nonnegative trivially");
    }
    return cert;
  }

  const RationalPolynomial q = square_free_part(p);
  const SturmSequence sturm(q);
  TrailStep sf;
  sf.kind = "square_free";
  sf.poly = q;
  cert.trail.push_back(sf);
  TrailStep st;
  st.kind = "sturm";
  st.counts = {sturm.variations(c.lo), sturm.variations(c.hi), sturm.count_open(c.lo, c.hi)};
  st.note = "chain length " + std::to_string(sturm.chain().size());
  cert.trail.push_back(st);

  const auto roots = isolate_roots(q, c.lo, c.hi);
  for (const auto& r : roots) {
    if (r.exact) {
      cert.trail.push_back(step("root_exact", {r.lo}));
    } else {
      cert.trail.push_back(step("root_cell", {r.lo, r.hi}));
    }
  }

  cert.status = CertStatus::verified;
  if (dir == Direction::positive) {
    for (const auto& r : roots) {
      if (r.exact) {
        cert.status = CertStatus::falsified;
        cert.witness = r.lo;
        cert.notes.push_back("root inside the domain");
        break;
      }
    }
  }

  Rational prev = c.lo;
  for (std::size_t k = 0; k <= roots.size(); ++k) {
    const Rational next = k < roots.size() ? roots[k].lo : c.hi;
    const Rational x = (prev + next) / 2;
    const Rational v = p(x);
    cert.trail.push_back(step("sample", {x, v}));
    if (!satisfies(v, dir) && cert.status != CertStatus::falsified) {
      cert.status = CertStatus::falsified;
      cert.witness = x;
    }
    if (k < roots.size()) prev = roots[k].hi;
  }
  if (c.closed) {
    for (const Rational& x : {c.lo, c.hi}) {
      const Rational v = p(x);
      cert.trail.push_back(step("endpoint", {x, v}));
      if (!satisfies(v, dir) && cert.status != CertStatus::falsified) {
        cert.status = CertStatus::falsified;
        cert.witness = x;
      }
    }
  }
  if (dir == Direction::positive && !roots.empty() && cert.status == CertStatus::verified) {
    // An irrational root of even multiplicity: p >= 0 around it but no
    // rational point where p vanishes.
    cert.status = CertStatus::inconclusive;
    cert.trail.push_back(step("inconclusive", {}, "root without a rational witness inside the domain"));
  }
  return cert;
}

Certificate certify_nonneg(const RationalPolynomial& p, bool closed, const Rational& lo, const Rational& hi,
                           Direction direction) {
  Claim c;
  c.polynomial = p;
  c.closed = closed;
  c.lo = lo;
  c.hi = hi;
  c.direction = direction;
  c.expression = p.to_string(c.variable);
  c.statement = c.expression + (direction == Direction::positive ? " > 0" : " >= 0") + " on " + interval_string(c);
  return certify_claim(std::move(c));
}

namespace {

struct Substitution {
  RationalPolynomial poly;
  BigInt q;
  Rational shift;
};

// f(r) r^shift as a polynomial in t = r^{1/q}.
Substitution substitute(const PowerSum& f) {
  Substitution s;
  s.shift = f.min_exponent() < 0 ? Rational(-f.min_exponent()) : Rational(0);
  const PowerSum g = f.shifted(s.shift);
  s.q = g.exponent_denominator_lcm();
  std::vector<Rational> coeffs;
  for (const auto& t : g.terms()) {
    Rational e = t.exponent * Rational(s.q);
    e.canonicalize();
    if (e.get_den() != 1 || e < 0) throw std::logic_error("substitution left a non-integer exponent");
    if (e > 100000) throw std::invalid_argument("substituted degree is unreasonably large");
    const auto k = e.get_num().get_ui();
    if (coeffs.size() <= k) coeffs.resize(k + 1, Rational(0));
    coeffs[k] += t.coeff;
  }
  s.poly = RationalPolynomial(std::move(coeffs));
  return s;
}

// Exact sign of p at k/D using integers only: with L p = sum a_i x^i,
// L D^n p(k/D) = sum a_i k^i D^(n-i).
class IntegerSampler {
 public:
  IntegerSampler(const RationalPolynomial& p, long D) {
    BigInt L = 1;
    for (const auto& c : p.coefficients()) L = lcm(L, c.get_den());
    const std::size_t n = p.coefficients().size();
    scaled_.resize(n);
    BigInt dpow = 1;
    for (std::size_t i = n; i-- > 0;) {
      scaled_[i] = Rational(p.coefficients()[i] * L).get_num() * dpow;
      dpow *= D;
    }
  }
  int sign_at(long k) const {
    BigInt acc = 0;
    for (std::size_t i = scaled_.size(); i-- > 0;) {
      mpz_mul_si(acc.get_mpz_t(), acc.get_mpz_t(), k);
      mpz_add(acc.get_mpz_t(), acc.get_mpz_t(), scaled_[i].get_mpz_t());
    }
    return sgn(acc);
  }

 private:
  std::vector<BigInt> scaled_;
};

// Dense exact sampling for substituted degrees beyond the cap. Points are
// t = round(r^(1/q) D)/D for r on a uniform grid, so r stays spread out.
void sample_fallback(Certificate& cert, const BigInt& q, const PowerSumClaimOptions& opts) {
  const Claim& c = cert.claim;
  const RationalPolynomial& p = *c.polynomial;
  const std::size_t M = std::max<std::size_t>(opts.samples, 1);
  const long D = 1L << 20;
  const double qd = q.get_d();

  std::vector<long> ks;
  ks.reserve(M);
  for (std::size_t i = 1; i <= M; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(M + 1);
    ks.push_back(std::clamp(std::lround(std::pow(r, 1.0 / qd) * D), 1L, D - 1));
  }
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  // Floating prescan orders the exact checks, most negative first, so a
  // violation is usually confirmed on the first exact evaluation.
  std::vector<std::pair<long double, long>> order;
  order.reserve(ks.size());
  std::vector<long double> approx_coeffs;
  for (const auto& x : p.coefficients()) approx_coeffs.push_back(static_cast<long double>(to_double(x)));
  for (long k : ks) {
    const long double t = static_cast<long double>(k) / D;
    long double acc = 0.0L;
    for (auto it = approx_coeffs.rbegin(); it != approx_coeffs.rend(); ++it) acc = acc * t + *it;
    order.emplace_back(acc, k);
  }
  std::sort(order.begin(), order.end());

  const IntegerSampler sampler(p, D);
  const int need = c.direction == Direction::positive ? 1 : 0;
  const std::size_t exact_checks = opts.dense ? order.size() : std::min<std::size_t>(order.size(), 64);
  for (std::size_t i = 0; i < exact_checks; ++i) {
    const long k = order[i].second;
    if (sampler.sign_at(k) < need) {
      const Rational x(k, D);
      cert.status = CertStatus::falsified;
      cert.witness = x;
      cert.trail.push_back(step("sample", {x, p(x)}, "exact sample violates the claim"));
      return;
    }
  }
  cert.status = CertStatus::inconclusive;
  std::string note = "degree " + std::to_string(p.degree()) + " above the cap; ";
  if (opts.dense) {
    note += "all " + std::to_string(ks.size()) + " exact samples satisfy the claim";
  } else {
    note += "dense sampling skipped; the " + std::to_string(exact_checks) +
            " lowest prescan points satisfy the claim exactly";
  }
  cert.trail.push_back(step("inconclusive", {}, note));
}

}  // namespace

Certificate certify_power_sum(const PowerSum& f, const std::string& statement, bool closed, Direction direction,
                              const PowerSumClaimOptions& opts) {
  const Substitution s = substitute(f);
  Claim c;
  c.statement = statement;
  c.expression = f.to_string("r");
  c.variable = "t";
  c.closed = closed && s.shift == 0;
  c.direction = direction;
  c.polynomial = s.poly;
  std::ostringstream red;
  red << "t = r^(1/" << s.q.get_str() << "), q=" << s.q.get_str();
  if (s.shift != 0) red << "; multiplied by r^(" << s.shift.get_str() << ") > 0";
  c.reduction = red.str();

  if (s.poly.degree() <= kMaxCertifyDegree) {
    Certificate cert = certify_claim(c);
    if (closed && !c.closed) cert.notes.push_back("negative exponents: certified on the open interval only");
    return cert;
  }
  Certificate cert;
  cert.claim = std::move(c);
  cert.notes.push_back("substituted degree " + std::to_string(s.poly.degree()) + " exceeds " +
                       std::to_string(kMaxCertifyDegree) + "; dense exact sampling, never verified");
  sample_fallback(cert, s.q, opts);
  return cert;
}

Certificate certify_hjh(Dimension n) {
  Claim c;
  c.polynomial = reduce_hjh(n);
  c.variable = "s";
  c.expression = c.polynomial->to_string("s");
  c.reduction = "s = r^(5/3); multiplied by r^(8/3) (9-4s)^2 > 0";
  c.statement = "N=" + std::to_string(n.value()) +
                ": 25N^2(N-4)^2/(32(9r^(4/3)-4r^3)^2) - 8(N-2/3)(N-8/3)/(5r^(8/3)) - 12(N^2-1)/(5r) >= 0 on (0,1)";
  return certify_claim(std::move(c), "hjh-N" + std::to_string(n.value()));
}

ThresholdTable threshold_table(Dimension n_min, Dimension n_max) {
  if (n_max < n_min) throw std::invalid_argument("empty dimension range");
  ThresholdTable t;
  for (int N = n_min.value(); N <= n_max.value(); ++N) {
    const Dimension d(N);
    ThresholdRow r;
    r.n = N;
    r.classical_lower = classical_lower_bound(d);
    r.lambda_bar = lambda_bar(d);
    r.hardy = hardy_constant(d);
    r.half_hardy = r.hardy / 2;
    r.two_lambda_bar = 2 * r.lambda_bar;
    r.twentyseven_lambda_bar = 27 * r.lambda_bar;
    r.regular_threshold = r.two_lambda_bar <= r.hardy;
    r.hjh_threshold = r.twentyseven_lambda_bar <= r.half_hardy;
    r.lambda_bar_positive = r.lambda_bar > 0;
    t.rows.push_back(std::move(r));
  }
  auto onset = [&](bool ThresholdRow::*field) -> std::optional<int> {
    std::optional<int> on;
    for (const auto& r : t.rows) {
      if (!r.lambda_bar_positive) continue;
      if (!(r.*field)) {
        on.reset();
      } else if (!on) {
        on = r.n;
      }
    }
    return on;
  };
  t.onset_regular = onset(&ThresholdRow::regular_threshold);
  t.onset_hjh = onset(&ThresholdRow::hjh_threshold);
  return t;
}

Certificate certify_thresholds(Dimension n_min, Dimension n_max) {
  const auto table = threshold_table(n_min, n_max);
  Certificate cert;
  cert.id = "thresholds-N" + std::to_string(n_min.value()) + "-" + std::to_string(n_max.value());
  cert.claim.statement =
      "for N in the range with lambda_bar > 0: 2*lambda_bar <= H_N iff N >= 9, and 27*lambda_bar <= H_N/2 iff N >= 31";
  cert.claim.expression = "lambda_bar = 8(3N-2)(3N-8)/81, H_N = N^2(N-4)^2/16";
  cert.claim.variable = "N";
  cert.claim.lo = n_min.value();
  cert.claim.hi = n_max.value();
  cert.claim.closed = true;
  cert.status = CertStatus::verified;

  auto check = [&](int N, bool holds, int first, const Rational& lhs, const Rational& rhs, const char* what) {
    TrailStep s;
    s.kind = "comparison";
    s.note = std::string(what) + " at N=" + std::to_string(N);
    s.values = {lhs, rhs};
    s.counts = {holds ? 1 : 0};
    cert.trail.push_back(std::move(s));
    const bool expected = N >= first;
    cert.trail.push_back(step("exact_value", {Rational(holds ? 1 : 0), Rational(expected ? 1 : 0)},
                              std::string(what) + " at N=" + std::to_string(N) + " matches the threshold"));
    if (holds != expected && cert.status != CertStatus::falsified) {
      cert.status = CertStatus::falsified;
      cert.witness = Rational(N);
    }
  };
  for (const auto& r : table.rows) {
    if (!r.lambda_bar_positive) {
      TrailStep s;
      s.kind = "note";
      s.note = "N=" + std::to_string(r.n) + ": lambda_bar = " + fraction_string(r.lambda_bar) +
               " <= 0, comparisons hold vacuously and are not asserted";
      cert.trail.push_back(std::move(s));
      continue;
    }
    check(r.n, r.regular_threshold, 9, r.two_lambda_bar, r.hardy, "2*lambda_bar <= H_N");
    check(r.n, r.hjh_threshold, 31, r.twentyseven_lambda_bar, r.half_hardy, "27*lambda_bar <= H_N/2");
  }
  if (cert.status == CertStatus::verified && (n_min.value() > 9 || n_max.value() < 31)) {
    cert.notes.push_back("range does not contain both switch points; only the rows present are asserted");
  }
  std::ostringstream os;
  os << "onset of 2*lambda_bar <= H_N: " << (table.onset_regular ? std::to_string(*table.onset_regular) : "none")
     << "; onset of 27*lambda_bar <= H_N/2: " << (table.onset_hjh ? std::to_string(*table.onset_hjh) : "none");
  cert.notes.push_back(os.str());
  return cert;
}

namespace {

Certificate composite(std::string id, std::string statement) {
  Certificate c;
  c.id = std::move(id);
  c.claim.statement = std::move(statement);
  c.status = CertStatus::verified;
  return c;
}

void exact_value(Certificate& c, const Rational& computed, const Rational& expected, const std::string& note,
                 const Rational& at) {
  c.trail.push_back(step("exact_value", {computed, expected}, note));
  if (computed != expected && c.status != CertStatus::falsified) {
    c.status = CertStatus::falsified;
    c.witness = at;
  }
}

void add_part(Certificate& c, Certificate part) {
  c.status = combine(c.status, part.status);
  if (part.status == CertStatus::falsified && !c.witness) c.witness = part.witness;
  c.parts.push_back(std::move(part));
}

}  // namespace

Certificate certify_w2(Dimension n) {
  const PowerSum w2 = w_m(2);
  const Rational lb = lambda_bar(n);
  const std::string tag = "N=" + std::to_string(n.value());
  Certificate cert = composite("w2-N" + std::to_string(n.value()),
                               tag + ": w_2 = 1 - 3r^(4/3) + 2r^2 satisfies Delta^2 w_2 <= 27 lambda_bar/(1-w_2)^2 "
                                     "on (0,1) and 1 - w_2 >= r^(4/3)");
  cert.claim.expression = w2.to_string("r");
  cert.claim.variable = "r";

  exact_value(cert, w2.value_at_one(), 0, "w_2(1) = 0", 1);
  exact_value(cert, w2.derivative().value_at_one(), 0, "w_2'(1) = 0", 1);
  // Delta^2 w_2 = 3 lambda_bar r^{-8/3}: checked symbolically.
  const PowerSum bil = apply_bilaplacian(w2, n);
  exact_value(cert, bil.coefficient(Rational(-8, 3)), 3 * lb, "coefficient of r^(-8/3) in Delta^2 w_2", 1);
  exact_value(cert, Rational(static_cast<long>(bil.terms().size())), 1, "Delta^2 w_2 is a single power", 1);
  // 1 - w_2 = r^{4/3}(3 - 2 r^{2/3})
  const PowerSum gap = PowerSum::constant(1) - w2;
  exact_value(cert, gap.coefficient(Rational(4, 3)), 3, "1 - w_2 = 3 r^(4/3) - 2 r^2: r^(4/3) coefficient", 1);
  exact_value(cert, gap.coefficient(2), -2, "1 - w_2 = 3 r^(4/3) - 2 r^2: r^2 coefficient", 1);

  // r^{8/3}(3-2t)^2 > 0 times (27 lb/(1-w)^2 - Delta^2 w) = 3 lb (9 - (3-2t)^2)
  Claim sub;
  const auto g = RationalPolynomial::linear(3, -2);
  sub.polynomial = (3 * lb) * (RationalPolynomial::constant(9) - g * g);
  sub.variable = "t";
  sub.expression = sub.polynomial->to_string("t");
  sub.reduction = "t = r^(2/3); multiplied by r^(8/3)(3-2t)^2 > 0";
  sub.statement = tag + ": 3 lambda_bar (9 - (3-2t)^2) >= 0 on (0,1)";
  Certificate subcert = certify_claim(std::move(sub), "w2-subsolution-N" + std::to_string(n.value()));
  if (lb <= 0) {
    subcert.notes.push_back("lambda_bar = " + fraction_string(lb) +
                            " <= 0, so the reduction to (3-2t)^2 <= 9 does not apply in this dimension");
  }
  add_part(cert, std::move(subcert));

  Claim phi;
  phi.polynomial = RationalPolynomial({0, 0, 2, -2});
  phi.variable = "t";
  phi.expression = phi.polynomial->to_string("t");
  phi.reduction = "t = r^(2/3); phi_0 = 2(r^(4/3) - r^2) = 2t^2 - 2t^3";
  phi.statement = "phi_0 = 2(r^(4/3) - r^2) >= 0 on (0,1)";
  add_part(cert, certify_claim(std::move(phi), "w2-phi0"));
  return cert;
}

Certificate certify_w3_stability(Dimension n) {
  if (n.value() < 5) throw std::invalid_argument("w3 stability bound needs N >= 5");
  Certificate cert = composite("w3-stability-N" + std::to_string(n.value()),
                               "sup over s in (0,1) of 125/(9-4s)^3 = 1, attained as s -> 1");
  cert.claim.variable = "s";
  cert.claim.expression = "125/(9-4s)^3";
  const auto g = RationalPolynomial::linear(9, -4);
  auto value = [](const Rational& s) -> Rational {
    const Rational d = 9 - 4 * s;
    return Rational(125) / (d * d * d);
  };
  exact_value(cert, value(0), Rational(125, 729), "value at s = 0", 0);
  exact_value(cert, value(1), 1, "value at s = 1", 1);

  Claim pos;
  pos.polynomial = g;
  pos.variable = "s";
  pos.closed = true;
  pos.direction = Direction::positive;
  pos.statement = "9 - 4s > 0 on [0,1]";
  add_part(cert, certify_claim(std::move(pos), "w3-denominator"));

  Claim bound;
  bound.polynomial = g.pow(3) - RationalPolynomial::constant(125);
  bound.variable = "s";
  bound.closed = true;
  bound.statement = "(9-4s)^3 - 125 >= 0 on [0,1], i.e. 125/(9-4s)^3 <= 1";
  add_part(cert, certify_claim(std::move(bound), "w3-bound"));

  Claim mono;
  mono.polynomial = RationalPolynomial::constant(1500);
  mono.variable = "s";
  mono.closed = true;
  mono.direction = Direction::positive;
  mono.reduction = "d/ds 125(9-4s)^(-3) = 1500 (9-4s)^(-4); denominator positive by w3-denominator";
  mono.statement = "numerator of the derivative is positive on [0,1]";
  add_part(cert, certify_claim(std::move(mono), "w3-monotone"));
  return cert;
}

}  // namespace mems4
