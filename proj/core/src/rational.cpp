#include "mems4/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace mems4 {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

namespace {

BigInt parse_integer(std::string_view digits) {
  if (digits.empty()) throw std::invalid_argument("empty integer literal");
  BigInt z;
  if (z.set_str(std::string(digits), 10) != 0) {
    throw std::invalid_argument("bad integer literal '" + std::string(digits) + "'");
  }
  return z;
}

Rational parse_decimal(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  long exp10 = 0;
  if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
    std::string exp_text(body.substr(e + 1));
    char* end = nullptr;
    exp10 = std::strtol(exp_text.c_str(), &end, 10);
    if (exp_text.empty() || *end != '\0') {
      throw std::invalid_argument("bad exponent in '" + std::string(text) + "'");
    }
    body = body.substr(0, e);
  }
  std::string digits;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    digits = std::string(body.substr(0, dot)) + std::string(body.substr(dot + 1));
    exp10 -= static_cast<long>(body.size() - dot - 1);
  } else {
    digits = std::string(body);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("bad number '" + std::string(text) + "'");
  }
  Rational q(parse_integer(digits));
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  if (exp10 >= 0) {
    q *= scale;
  } else {
    q /= scale;
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }
  return parse_decimal(text);
}

std::string fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_fraction_string(std::string_view text) { return parse_rational(text); }

double to_double(const Rational& q) {
  // 40 significant digits then strtod gives the correctly rounded double for
  // every value we emit; mpq_get_d truncates toward zero.
  mpf_class f(q, 256);
  char buf[96];
  gmp_snprintf(buf, sizeof buf, "%.40Fe", f.get_mpf_t());
  return std::strtod(buf, nullptr);
}

std::string decimal_string(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string decimal_string(const Rational& q) { return decimal_string(to_double(q)); }

Rational from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite double");
  Rational q(x);
  q.canonicalize();
  return q;
}

namespace {

std::optional<BigInt> exact_root(const BigInt& value, unsigned long degree) {
  BigInt root;
  if (mpz_root(root.get_mpz_t(), value.get_mpz_t(), degree) == 0) return std::nullopt;
  return root;
}

}  // namespace

Rational ipow(const Rational& base, long exponent) {
  if (exponent < 0 && base == 0) throw std::domain_error("0 raised to a negative power");
  unsigned long e = static_cast<unsigned long>(std::labs(exponent));
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational out = exponent >= 0 ? Rational(num, den) : Rational(den, num);
  out.canonicalize();
  return out;
}

std::optional<Rational> exact_power(const Rational& base, const Rational& exponent) {
  if (base < 0) throw std::domain_error("exact_power: negative base");
  if (base == 0) {
    if (exponent <= 0) throw std::domain_error("exact_power: 0 to a nonpositive power");
    return Rational(0);
  }
  if (!exponent.get_den().fits_ulong_p() || !exponent.get_num().fits_slong_p()) {
    return std::nullopt;
  }
  const unsigned long q = exponent.get_den().get_ui();
  const long p = exponent.get_num().get_si();
  auto num = exact_root(base.get_num(), q);
  auto den = exact_root(base.get_den(), q);
  if (!num || !den) return std::nullopt;
  return ipow(Rational(*num, *den), p);
}

int sign(const Rational& q) { return sgn(q); }

BigInt lcm(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

}  // namespace mems4
