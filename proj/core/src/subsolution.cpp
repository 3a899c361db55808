#include "mems4/subsolution.hpp"

#include <atomic>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mems4 {

std::string to_string(RemarkCoefficient c) {
  switch (c) {
    case RemarkCoefficient::literal: return "literal";
    case RemarkCoefficient::literal_corrected: return "literal-corrected";
    case RemarkCoefficient::slope_matched: return "slope-matched";
  }
  return "literal";
}

RemarkCoefficient remark_coefficient_from_string(const std::string& s) {
  if (s == "literal") return RemarkCoefficient::literal;
  if (s == "literal-corrected") return RemarkCoefficient::literal_corrected;
  if (s == "slope-matched") return RemarkCoefficient::slope_matched;
  throw std::invalid_argument("unknown coefficient variant: " + s);
}

Candidate remark_candidate(const Rational& alpha, const Rational& beta, RemarkCoefficient coefficient) {
  if (!(alpha > 0) || !(beta > 0)) throw std::invalid_argument("alpha and beta must be positive");
  const Rational kappa = coefficient == RemarkCoefficient::slope_matched ? Rational(Rational(4) / (3 * beta)) : Rational(4 * beta / 3);
  PowerSum w = singular_profile() - kappa * (PowerSum::monomial(1, alpha) - PowerSum::monomial(1, alpha + beta));
  Candidate c;
  c.family = "remark-phi0";
  c.params = {{"alpha", alpha}, {"beta", beta}, {"kappa", kappa}};
  if (coefficient == RemarkCoefficient::literal_corrected) {
    const Rational corr = Rational(3, 2) * (kappa * beta - Rational(4, 3));
    w += corr * (PowerSum::monomial(1, Rational(4, 3)) - PowerSum::monomial(1, 2));
    c.params.emplace_back("correction", corr);
  }
  c.w = std::move(w);
  std::ostringstream os;
  os << "alpha=" << alpha.get_str() << " beta=" << beta.get_str() << " " << to_string(coefficient);
  c.label = os.str();
  return c;
}

Candidate wm_candidate(const Rational& m) {
  Candidate c;
  c.family = "wm";
  c.params = {{"m", m}};
  c.w = w_m(m);
  c.label = "m=" + m.get_str();
  return c;
}

std::vector<Candidate> remark_family(const std::vector<Rational>& alphas, const std::vector<Rational>& betas,
                                     const std::vector<RemarkCoefficient>& variants) {
  std::vector<Candidate> out;
  for (const auto& a : alphas) {
    for (const auto& b : betas) {
      for (auto v : variants) out.push_back(remark_candidate(a, b, v));
    }
  }
  return out;
}

std::vector<Candidate> wm_family(const std::vector<Rational>& ms) {
  std::vector<Candidate> out;
  for (const auto& m : ms) out.push_back(wm_candidate(m));
  return out;
}

namespace {

TrailStep exact(const Rational& computed, const Rational& expected, std::string note) {
  TrailStep s;
  s.kind = "exact_value";
  s.values = {computed, expected};
  s.note = std::move(note);
  return s;
}

void record(Certificate& c, const Rational& computed, const Rational& expected, std::string note,
            const Rational& at) {
  c.trail.push_back(exact(computed, expected, std::move(note)));
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

CandidateReport check_candidate(const Candidate& cand, Dimension n, const Rational& lambda,
                                const PowerSumClaimOptions& popts) {
  CandidateReport rep;
  rep.candidate = cand;
  const PowerSum& w = cand.w;
  const PowerSum one_minus = PowerSum::constant(1) - w;
  const std::string id = cand.family + " " + cand.label;

  Certificate& b = rep.boundary;
  b.id = id + " boundary";
  b.claim.statement = "w(1) = 0 and w'(1) = 0";
  b.claim.expression = w.to_string("r");
  b.claim.variable = "r";
  b.status = CertStatus::verified;
  record(b, w.value_at_one(), 0, "w(1)", 1);
  record(b, w.derivative().value_at_one(), 0, "w'(1)", 1);

  // Once a candidate has failed, later checks skip the dense exact sweep.
  PowerSumClaimOptions later = popts;
  if (b.status == CertStatus::falsified) later.dense = false;

  // (1-w)^2 Delta^2 w <= lambda, i.e. Delta^2 w <= lambda/(1-w)^2 where 1-w > 0.
  const PowerSum sub = PowerSum::constant(lambda) - one_minus.pow(2) * apply_bilaplacian(w, n);
  rep.subsolution = certify_power_sum(sub, "lambda - (1-w)^2 Delta^2 w >= 0 on (0,1)", false,
                                      Direction::nonnegative, later);
  rep.subsolution.id = id + " subsolution";
  if (rep.subsolution.status == CertStatus::falsified) later.dense = false;

  Certificate& g = rep.range;
  g.id = id + " range";
  g.claim.statement = "w(0) = 1 and 0 <= w <= 1 on [0,1]";
  g.claim.expression = w.to_string("r");
  g.claim.variable = "r";
  g.status = CertStatus::verified;
  bool positive_powers = true;
  for (const auto& t : w.terms()) {
    if (t.exponent < 0) positive_powers = false;
  }
  record(g, Rational(positive_powers ? 1 : 0), 1, "no negative powers of r", 0);
  record(g, w.coefficient(0), 1, "w(0): constant term", 0);
  if (positive_powers) {
    add_part(g, certify_power_sum(w, "w >= 0 on [0,1]", true, Direction::nonnegative, later));
    add_part(g, certify_power_sum(one_minus, "1 - w >= 0 on [0,1]", true, Direction::nonnegative, later));
  }
  if (g.status == CertStatus::falsified) later.dense = false;

  const PowerSum stab = hardy_constant(n) * one_minus.pow(3) - PowerSum::monomial(2 * lambda, 4);
  rep.stability = certify_power_sum(stab, "H_N (1-w)^3 - 2 lambda r^4 >= 0 on (0,1)", false,
                                    Direction::nonnegative, later);
  rep.stability.id = id + " stability";

  rep.passes_all = b.status == CertStatus::verified && g.status == CertStatus::verified &&
                   rep.subsolution.status == CertStatus::verified && rep.stability.status == CertStatus::verified;
  return rep;
}

}  // namespace

SearchReport subsolution_search(Dimension n, const std::vector<Candidate>& family,
                                const std::optional<Rational>& lambda, const SearchOptions& opts) {
  SearchReport rep;
  rep.dimension = n.value();
  rep.lambda = lambda ? *lambda : hardy_constant(n) / 2;
  rep.in_open_range = n.value() >= 9 && n.value() <= 16;
  if (!rep.in_open_range) rep.notes.push_back("dimension outside 9..16: a sanity run, not a search in the open range");
  rep.notes.push_back(
      "the perturbation's combination with 1 - r^(4/3) is ambiguous: the literal coefficient 4beta/3 breaks "
      "w'(1) = 0 unless beta = 1; literal-corrected and slope-matched variants are reported alongside");
  if (family.empty()) return rep;

  PowerSumClaimOptions popts;
  popts.samples = opts.samples;
  rep.candidates.resize(family.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < family.size(); i = next++) {
      rep.candidates[i] = check_candidate(family[i], n, rep.lambda, popts);
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(family.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& c : rep.candidates) {
    if (c.passes_all) ++rep.passing;
    const std::pair<const char*, const Certificate*> checks[] = {
        {"boundary", &c.boundary}, {"range", &c.range}, {"subsolution", &c.subsolution}, {"stability", &c.stability}};
    for (const auto& [name, cert] : checks) {
      auto& f = rep.failures[name];
      if (cert->status == CertStatus::falsified) ++f.first;
      if (cert->status == CertStatus::inconclusive) ++f.second;
    }
  }
  return rep;
}

}  // namespace mems4
