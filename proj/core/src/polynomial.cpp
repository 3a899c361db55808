#include "mems4/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mems4 {

RationalPolynomial::RationalPolynomial(std::vector<Rational> ascending) : c_(std::move(ascending)) {
  for (auto& x : c_) x.canonicalize();
  trim();
}

void RationalPolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

RationalPolynomial RationalPolynomial::constant(const Rational& c) { return RationalPolynomial({c}); }

RationalPolynomial RationalPolynomial::monomial(const Rational& c, unsigned degree) {
  std::vector<Rational> v(degree + 1, Rational(0));
  v[degree] = c;
  return RationalPolynomial(std::move(v));
}

RationalPolynomial RationalPolynomial::linear(const Rational& a, const Rational& b) {
  return RationalPolynomial({a, b});
}

Rational RationalPolynomial::coefficient(unsigned k) const { return k < c_.size() ? c_[k] : Rational(0); }

Rational RationalPolynomial::leading() const { return c_.empty() ? Rational(0) : c_.back(); }

Rational RationalPolynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

long double RationalPolynomial::eval_extended(long double x) const {
  long double acc = 0.0L;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + static_cast<long double>(to_double(*it));
  return acc;
}

RationalPolynomial RationalPolynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<long>(k);
  return RationalPolynomial(std::move(d));
}

RationalPolynomial RationalPolynomial::pow(unsigned k) const {
  RationalPolynomial out = constant(1);
  for (unsigned i = 0; i < k; ++i) out = out * *this;
  return out;
}

RationalPolynomial RationalPolynomial::compose_linear(const Rational& a, const Rational& b) const {
  const RationalPolynomial inner = linear(a, b);
  RationalPolynomial acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * inner + constant(*it);
  return acc;
}

RationalPolynomial RationalPolynomial::monic() const {
  if (is_zero()) return {};
  const Rational lc = leading();
  std::vector<Rational> v = c_;
  for (auto& x : v) x /= lc;
  return RationalPolynomial(std::move(v));
}

RationalPolynomial RationalPolynomial::operator-() const {
  std::vector<Rational> v = c_;
  for (auto& x : v) x = -x;
  return RationalPolynomial(std::move(v));
}

RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b) {
  std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
  return RationalPolynomial(std::move(v));
}

RationalPolynomial operator-(const RationalPolynomial& a, const RationalPolynomial& b) { return a + (-b); }

RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> v(a.c_.size() + b.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  }
  return RationalPolynomial(std::move(v));
}

RationalPolynomial operator*(const Rational& s, const RationalPolynomial& a) { return RationalPolynomial::constant(s) * a; }

std::string RationalPolynomial::to_string(const std::string& var) const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = c_.size(); k-- > 0;) {
    Rational c = c_[k];
    if (c == 0) continue;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      c = abs(c);
    } else if (c < 0) {
      os << "-";
      c = abs(c);
    }
    first = false;
    if (k == 0) {
      os << c.get_str();
      continue;
    }
    if (c != 1) os << c.get_str() << "*";
    os << var;
    if (k > 1) os << "^" << k;
  }
  return os.str();
}

DivMod divmod(const RationalPolynomial& a, const RationalPolynomial& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> rem = a.coefficients();
  const auto& d = b.coefficients();
  const int db = b.degree();
  if (a.degree() < db) return {{}, a};
  std::vector<Rational> quot(a.degree() - db + 1, Rational(0));
  for (int k = a.degree(); k >= db; --k) {
    if (rem[k] == 0) continue;
    const Rational f = rem[k] / d[db];
    quot[k - db] = f;
    for (int j = 0; j <= db; ++j) rem[k - db + j] -= f * d[j];
  }
  rem.resize(db);
  return {RationalPolynomial(std::move(quot)), RationalPolynomial(std::move(rem))};
}

RationalPolynomial gcd(const RationalPolynomial& a, const RationalPolynomial& b) {
  RationalPolynomial x = a, y = b;
  while (!y.is_zero()) {
    RationalPolynomial r = divmod(x, y).remainder;
    x = std::move(y);
    y = r.monic();
  }
  return x.monic();
}

RationalPolynomial square_free_part(const RationalPolynomial& p) {
  if (p.degree() <= 0) return p.monic();
  const RationalPolynomial g = gcd(p, p.derivative());
  return divmod(p, g).quotient.monic();
}

SturmSequence::SturmSequence(const RationalPolynomial& q) {
  if (q.is_zero()) throw std::invalid_argument("Sturm chain of the zero polynomial");
  chain_.push_back(q);
  if (q.degree() == 0) return;
  chain_.push_back(q.derivative());
  while (true) {
    const auto& a = chain_[chain_.size() - 2];
    const auto& b = chain_.back();
    RationalPolynomial r = divmod(a, b).remainder;
    if (r.is_zero()) break;
    // Classical chain uses -r; a positive rescale keeps signs.
    r = -r;
    const Rational lc = abs(r.leading());
    chain_.push_back((Rational(1) / lc) * r);
  }
}

int SturmSequence::variations(const Rational& x) const {
  int changes = 0;
  int last = 0;
  for (const auto& p : chain_) {
    const int s = sign(p(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int SturmSequence::count_half_open(const Rational& a, const Rational& b) const {
  return variations(a) - variations(b);
}

int SturmSequence::count_open(const Rational& a, const Rational& b) const {
  if (!(a < b)) return 0;
  return count_half_open(a, b) - (chain_.front()(b) == 0 ? 1 : 0);
}

namespace {

struct Pending {
  Rational lo, hi;
  int count;
};

// Shrinks an open single-root cell until lo > floor and hi < ceil (strictly),
// or until it collapses onto an exact root.
RootCell tighten(const RationalPolynomial& q, const SturmSequence& s, RootCell c, const Rational& floor,
                 const Rational& ceil) {
  while (!c.exact && (c.lo <= floor || c.hi >= ceil)) {
    Rational mid = (c.lo + c.hi) / 2;
    if (q(mid) == 0) return {mid, mid, true};
    if (s.count_open(c.lo, mid) == 1) {
      c.hi = mid;
    } else {
      c.lo = mid;
    }
  }
  return c;
}

}  // namespace

std::vector<RootCell> isolate_roots(const RationalPolynomial& q, const Rational& a, const Rational& b) {
  std::vector<RootCell> cells;
  if (q.degree() <= 0 || !(a < b)) return cells;
  const SturmSequence s(q);
  std::vector<Pending> stack{{a, b, s.count_open(a, b)}};
  while (!stack.empty()) {
    Pending p = stack.back();
    stack.pop_back();
    if (p.count == 0) continue;
    if (p.count == 1 && p.lo != a && p.hi != b && q(p.lo) != 0 && q(p.hi) != 0) {
      cells.push_back({p.lo, p.hi, false});
      continue;
    }
    const Rational mid = (p.lo + p.hi) / 2;
    const bool root = q(mid) == 0;
    if (root) cells.push_back({mid, mid, true});
    const int left = s.count_open(p.lo, mid);
    stack.push_back({mid, p.hi, p.count - left - (root ? 1 : 0)});
    stack.push_back({p.lo, mid, left});
  }
  std::sort(cells.begin(), cells.end(), [](const RootCell& x, const RootCell& y) { return x.lo < y.lo; });

  // Separate neighbours: every open cell must end strictly before the next
  // begins, and stay strictly inside (a, b). Tightening only moves lo up and
  // hi down, so one left-to-right pass suffices.
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const Rational floor = k == 0 ? a : cells[k - 1].hi;
    const Rational ceil = k + 1 < cells.size() ? cells[k + 1].lo : b;
    cells[k] = tighten(q, s, cells[k], floor, ceil);
  }
  return cells;
}

}  // namespace mems4
