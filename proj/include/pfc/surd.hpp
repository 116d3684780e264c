#ifndef PFC_SURD_HPP
#define PFC_SURD_HPP

#include <complex>
#include <cstdint>
#include <string>

#include "pfc/rational.hpp"

namespace pfc {

/// Element a + b*sqrt(d) of the quadratic field Q(sqrt(d)), d a squarefree
/// integer other than 0 and 1. Rationals embed with b = 0 and mix freely
/// with any field; combining two genuinely irrational values from
/// different fields throws std::domain_error.
class QuadSurd {
 public:
  QuadSurd() = default;
  QuadSurd(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  QuadSurd(Rational a) : a_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  /// radicand need not be squarefree; square factors are pulled into b.
  QuadSurd(Rational a, Rational b, std::int64_t radicand);

  const Rational& rational_part() const { return a_; }
  const Rational& surd_part() const { return b_; }
  std::int64_t radicand() const { return d_; }
  bool is_rational() const { return b_ == 0; }

  QuadSurd conjugate() const;
  /// (a + b sqrt d)(a - b sqrt d) = a^2 - d b^2, always rational.
  Rational norm() const;

  /// Exact sign; requires d > 0 (a real field).
  int sign() const;

  double to_double() const;
  std::complex<double> to_complex() const;

  /// "(-1-sqrt(13))/6", "(3+sqrt(13))/2", "2/3", "0".
  std::string to_string() const;

  QuadSurd& operator+=(const QuadSurd& o);
  QuadSurd& operator-=(const QuadSurd& o);
  QuadSurd& operator*=(const QuadSurd& o);
  QuadSurd& operator/=(const QuadSurd& o);

  friend QuadSurd operator+(QuadSurd x, const QuadSurd& y) { return x += y; }
  friend QuadSurd operator-(QuadSurd x, const QuadSurd& y) { return x -= y; }
  friend QuadSurd operator*(QuadSurd x, const QuadSurd& y) { return x *= y; }
  friend QuadSurd operator/(QuadSurd x, const QuadSurd& y) { return x /= y; }
  friend QuadSurd operator-(const QuadSurd& x) {
    QuadSurd r = x;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
  }
  friend bool operator==(const QuadSurd& x, const QuadSurd& y);
  friend bool operator!=(const QuadSurd& x, const QuadSurd& y) { return !(x == y); }

 private:
  std::int64_t join_radicand(const QuadSurd& o) const;

  Rational a_;
  Rational b_;
  std::int64_t d_ = 0;
};

inline int sign(const QuadSurd& s) { return s.sign(); }
inline double to_double(const QuadSurd& s) { return s.to_double(); }

QuadSurd pow(const QuadSurd& base, unsigned e);

/// Largest k with k^2 | n, and n / k^2. Used to normalize radicands.
std::pair<Integer, Integer> split_square_factor(const Integer& n);

}  // namespace pfc

#endif  // PFC_SURD_HPP
