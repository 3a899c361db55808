#include "mems4/power_sum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mems4 {

namespace {

struct ExponentLess {
  bool operator()(const Rational& a, const Rational& b) const { return cmp(a, b) < 0; }
};

}  // namespace

PowerSum::PowerSum(std::vector<PowerTerm> terms) : terms_(std::move(terms)) { normalize(); }

PowerSum PowerSum::constant(const Rational& c) { return PowerSum({{c, Rational(0)}}); }

PowerSum PowerSum::monomial(const Rational& coeff, const Rational& exponent) {
  return PowerSum({{coeff, exponent}});
}

void PowerSum::normalize() {
  std::map<Rational, Rational, ExponentLess> merged;
  for (auto& t : terms_) {
    t.coeff.canonicalize();
    t.exponent.canonicalize();
    merged[t.exponent] += t.coeff;
  }
  terms_.clear();
  for (auto& [s, c] : merged) {
    if (c != 0) terms_.push_back({c, s});
  }
}

Rational PowerSum::coefficient(const Rational& exponent) const {
  for (const auto& t : terms_) {
    if (t.exponent == exponent) return t.coeff;
  }
  return 0;
}

Rational PowerSum::min_exponent() const { return terms_.empty() ? Rational(0) : terms_.front().exponent; }

Rational PowerSum::max_exponent() const { return terms_.empty() ? Rational(0) : terms_.back().exponent; }

BigInt PowerSum::exponent_denominator_lcm() const {
  BigInt q = 1;
  for (const auto& t : terms_) q = lcm(q, t.exponent.get_den());
  return q;
}

PowerSum PowerSum::operator-() const {
  PowerSum out = *this;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

PowerSum& PowerSum::operator+=(const PowerSum& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  normalize();
  return *this;
}

PowerSum& PowerSum::operator-=(const PowerSum& other) { return *this += -other; }

PowerSum& PowerSum::operator*=(const Rational& scale) {
  for (auto& t : terms_) t.coeff *= scale;
  normalize();
  return *this;
}

PowerSum operator*(const PowerSum& a, const PowerSum& b) {
  std::vector<PowerTerm> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) out.push_back({x.coeff * y.coeff, x.exponent + y.exponent});
  }
  return PowerSum(std::move(out));
}

bool operator==(const PowerSum& a, const PowerSum& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].coeff != b.terms_[i].coeff || a.terms_[i].exponent != b.terms_[i].exponent) return false;
  }
  return true;
}

PowerSum PowerSum::pow(unsigned k) const {
  PowerSum out = constant(1);
  for (unsigned i = 0; i < k; ++i) out = out * *this;
  return out;
}

PowerSum PowerSum::derivative() const {
  std::vector<PowerTerm> out;
  for (const auto& t : terms_) out.push_back({t.coeff * t.exponent, t.exponent - 1});
  return PowerSum(std::move(out));
}

PowerSum PowerSum::shifted(const Rational& shift) const {
  PowerSum out = *this;
  for (auto& t : out.terms_) t.exponent += shift;
  return out;
}

double PowerSum::operator()(double r) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    const double c = to_double(t.coeff);
    sum += t.exponent == 0 ? c : c * std::pow(r, to_double(t.exponent));
  }
  return sum;
}

long double PowerSum::eval_extended(long double r) const {
  long double sum = 0.0L;
  for (const auto& t : terms_) {
    const long double c = static_cast<long double>(to_double(t.coeff)) +
                          static_cast<long double>(to_double(t.coeff - from_double(to_double(t.coeff))));
    if (t.exponent == 0) {
      sum += c;
      continue;
    }
    const long double s = static_cast<long double>(t.exponent.get_num().get_si()) /
                          static_cast<long double>(t.exponent.get_den().get_si());
    sum += c * std::pow(r, s);
  }
  return sum;
}

std::optional<Rational> PowerSum::evaluate_exact(const Rational& r) const {
  Rational sum = 0;
  for (const auto& t : terms_) {
    if (t.exponent == 0) {
      sum += t.coeff;
      continue;
    }
    auto p = exact_power(r, t.exponent);
    if (!p) return std::nullopt;
    sum += t.coeff * *p;
  }
  return sum;
}

Rational PowerSum::value_at_one() const {
  Rational sum = 0;
  for (const auto& t : terms_) sum += t.coeff;
  return sum;
}

std::string PowerSum::to_string(const std::string& var) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    Rational c = t.coeff;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      c = abs(c);
    } else if (c < 0) {
      os << "-";
      c = abs(c);
    }
    first = false;
    if (t.exponent == 0) {
      os << c.get_str();
      continue;
    }
    if (c != 1) os << c.get_str() << "*";
    os << var;
    if (t.exponent != 1) os << "^(" << t.exponent.get_str() << ")";
  }
  return os.str();
}

}  // namespace mems4
