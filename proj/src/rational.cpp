#include "pfc/rational.hpp"

#include <stdexcept>

namespace pfc {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

Integer parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw std::invalid_argument("malformed integer: '" + std::string(s) + "'");
  Integer z(std::string(s), 10);
  return negative ? Integer(-z) : z;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return make_rational(num, den);
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view fraction = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
    if (whole.empty()) whole = "0";
    if (fraction.empty() || !all_digits(fraction) || !all_digits(whole))
      throw std::invalid_argument("malformed decimal: '" + std::string(text) + "'");
    Integer den = 1;
    for (std::size_t i = 0; i < fraction.size(); ++i) den *= 10;
    Integer num = Integer(std::string(whole), 10) * den + Integer(std::string(fraction), 10);
    if (negative) num = -num;
    return make_rational(num, den);
  }

  return Rational(parse_integer(text));
}

std::string to_fraction_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return to_fraction_string(r);
}

Integer floor_integer(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Rational floor_rational(const Rational& r) { return Rational(floor_integer(r)); }

Rational frac(const Rational& r) { return r - floor_rational(r); }

Rational pow(const Rational& base, unsigned e) {
  Rational out(1);
  Rational b = base;
  while (e > 0) {
    if (e & 1u) out *= b;
    e >>= 1u;
    if (e > 0) b *= b;
  }
  return out;
}

}  // namespace pfc
