#include "pfc/surd.hpp"

#include <cmath>
#include <stdexcept>

namespace pfc {

std::pair<Integer, Integer> split_square_factor(const Integer& n) {
  Integer rest = abs(n);
  Integer root = 1;
  if (rest == 0) return {Integer(0), Integer(0)};
  // Trial division is fine for the small radicands produced by 2x2 factors
  // of characteristic polynomials; callers reject anything huge beforehand.
  for (Integer f = 2; f * f <= rest; ++f) {
    Integer sq = f * f;
    while (rest % sq == 0) {
      rest /= sq;
      root *= f;
    }
  }
  if (n < 0) rest = -rest;
  return {root, rest};
}

QuadSurd::QuadSurd(Rational a, Rational b, std::int64_t radicand) : a_(std::move(a)), b_(std::move(b)) {
  if (b_ == 0 || radicand == 0) {
    if (radicand == 0) b_ = 0;
    d_ = b_ == 0 ? 0 : radicand;
    return;
  }
  auto [root, rest] = split_square_factor(Integer(static_cast<long>(radicand)));
  b_ *= Rational(root);
  if (rest == 1) {
    a_ += b_;
    b_ = 0;
    d_ = 0;
    return;
  }
  d_ = rest.get_si();
}

std::int64_t QuadSurd::join_radicand(const QuadSurd& o) const {
  if (b_ == 0) return o.d_;
  if (o.b_ == 0) return d_;
  if (d_ != o.d_) throw std::domain_error("mixing surds from different quadratic fields");
  return d_;
}

QuadSurd QuadSurd::conjugate() const {
  QuadSurd r = *this;
  r.b_ = -r.b_;
  return r;
}

Rational QuadSurd::norm() const { return a_ * a_ - Rational(d_) * b_ * b_; }

int QuadSurd::sign() const {
  int sa = sgn(a_);
  int sb = sgn(b_);
  if (sb == 0) return sa;
  if (d_ < 0) throw std::domain_error("sign of a non-real surd");
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // opposite signs: compare a^2 with d b^2
  int c = cmp(a_ * a_, Rational(d_) * b_ * b_);
  if (c == 0) return 0;
  return c > 0 ? sa : sb;
}

double QuadSurd::to_double() const {
  if (b_ == 0) return a_.get_d();
  if (d_ < 0) throw std::domain_error("to_double of a non-real surd");
  return a_.get_d() + b_.get_d() * std::sqrt(static_cast<double>(d_));
}

std::complex<double> QuadSurd::to_complex() const {
  if (b_ == 0 || d_ > 0) return {to_double(), 0.0};
  return {a_.get_d(), b_.get_d() * std::sqrt(static_cast<double>(-d_))};
}

std::string QuadSurd::to_string() const {
  if (b_ == 0) return pfc::to_string(a_);
  Integer den;
  mpz_lcm(den.get_mpz_t(), a_.get_den_mpz_t(), b_.get_den_mpz_t());
  Integer num_a = a_.get_num() * (den / a_.get_den());
  Integer num_b = b_.get_num() * (den / b_.get_den());
  std::string root = "sqrt(" + std::to_string(d_) + ")";
  std::string out;
  if (num_a != 0) out = num_a.get_str();
  if (num_b == 1) {
    out += (num_a != 0 ? "+" : "") + root;
  } else if (num_b == -1) {
    out += "-" + root;
  } else {
    if (num_b > 0 && num_a != 0) out += "+";
    out += num_b.get_str() + "*" + root;
  }
  if (den == 1) return out;
  return "(" + out + ")/" + den.get_str();
}

QuadSurd& QuadSurd::operator+=(const QuadSurd& o) {
  d_ = join_radicand(o);
  a_ += o.a_;
  b_ += o.b_;
  if (b_ == 0) d_ = 0;
  return *this;
}

QuadSurd& QuadSurd::operator-=(const QuadSurd& o) {
  d_ = join_radicand(o);
  a_ -= o.a_;
  b_ -= o.b_;
  if (b_ == 0) d_ = 0;
  return *this;
}

QuadSurd& QuadSurd::operator*=(const QuadSurd& o) {
  std::int64_t d = join_radicand(o);
  if (b_ == 0 && o.b_ == 0) {
    a_ *= o.a_;
    return *this;
  }
  Rational a = a_ * o.a_ + Rational(d) * b_ * o.b_;
  Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  d_ = b_ == 0 ? 0 : d;
  return *this;
}

QuadSurd& QuadSurd::operator/=(const QuadSurd& o) {
  if (o.b_ == 0) {
    if (o.a_ == 0) throw std::domain_error("division by zero surd");
    a_ /= o.a_;
    b_ /= o.a_;
    return *this;
  }
  Rational n = o.norm();
  if (n == 0) throw std::domain_error("division by zero surd");
  *this *= o.conjugate();
  a_ /= n;
  b_ /= n;
  return *this;
}

bool operator==(const QuadSurd& x, const QuadSurd& y) {
  if (x.a_ != y.a_ || x.b_ != y.b_) return false;
  return x.b_ == 0 || x.d_ == y.d_;
}

QuadSurd pow(const QuadSurd& base, unsigned e) {
  QuadSurd out(1);
  QuadSurd b = base;
  while (e > 0) {
    if (e & 1u) out *= b;
    e >>= 1u;
    if (e > 0) b *= b;
  }
  return out;
}

}  // namespace pfc
