#ifndef PFC_RATIONAL_HPP
#define PFC_RATIONAL_HPP

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace pfc {

/// Arbitrary-precision rational. GMP keeps every result of arithmetic in
/// canonical form (gcd(num, den) = 1, den > 0); values built from a
/// numerator/denominator pair go through make_rational().
using Rational = mpq_class;
using Integer = mpz_class;

Rational make_rational(long num, long den = 1);
Rational make_rational(const Integer& num, const Integer& den);

/// Parses "num/den", "num" or a plain decimal literal such as "0.7" (read
/// exactly, 0.7 -> 7/10). Throws std::invalid_argument on malformed input
/// or a zero denominator.
Rational parse_rational(std::string_view text);

/// Always "num/den", also for integers ("2/1"), the lift file format.
std::string to_fraction_string(const Rational& r);

/// "2/3", "-1", "0": the human-oriented form used in reports.
std::string to_string(const Rational& r);

inline int sign(const Rational& r) { return sgn(r); }
inline double to_double(const Rational& r) { return r.get_d(); }

Rational floor_rational(const Rational& r);
Integer floor_integer(const Rational& r);

/// r mod 1 in [0, 1).
Rational frac(const Rational& r);

/// base^e for e >= 0.
Rational pow(const Rational& base, unsigned e);

}  // namespace pfc

#endif  // PFC_RATIONAL_HPP
