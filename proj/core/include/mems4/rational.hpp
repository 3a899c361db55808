#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mems4 {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Canonical rational num/den; throws std::invalid_argument on den == 0.
Rational make_rational(long num, long den = 1);

/// Parses "p/q", an integer, or a finite decimal such as "0.1" or "-2.5e-3"
/// into the exact rational it denotes. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Always "num/den", including integers ("3/1"). Used in every on-disk format.
std::string fraction_string(const Rational& q);

/// Inverse of fraction_string (also accepts anything parse_rational accepts).
Rational parse_fraction_string(std::string_view text);

/// Nearest double (round-to-nearest, unlike mpq_get_d which truncates).
double to_double(const Rational& q);

/// 17 significant digits, the format paired with fraction strings in outputs.
std::string decimal_string(const Rational& q);
std::string decimal_string(double x);

/// Exact conversion of a finite double.
Rational from_double(double x);

/// base^(p/q) when the result is rational, std::nullopt otherwise.
/// base must be nonnegative; 0^s with s <= 0 is rejected.
std::optional<Rational> exact_power(const Rational& base, const Rational& exponent);

/// Integer power with a signed exponent.
Rational ipow(const Rational& base, long exponent);

int sign(const Rational& q);

BigInt lcm(const BigInt& a, const BigInt& b);

}  // namespace mems4
