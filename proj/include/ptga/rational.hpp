#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace ptga {

using Rational = mpq_class;

// n/d in canonical form. The two-argument mpq_class constructor does not
// canonicalize, and GMP's comparisons assume canonical operands.
inline Rational ratio(long n, long d)
{
  Rational q(n, d);
  q.canonicalize();
  return q;
}

// Accepts "3", "-3", "1/2", "0.25". Decimal literals convert exactly.
Rational parse_rational(std::string_view text);

// "p/q", or just "p" when the denominator is one.
std::string to_string(const Rational& q);

double to_double(const Rational& q);
Rational floor_of(const Rational& q);
Rational frac_of(const Rational& q);

}  // namespace ptga
