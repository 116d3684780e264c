#ifndef PFC_JUMP_FUNCTION_HPP
#define PFC_JUMP_FUNCTION_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "pfc/rational.hpp"
#include "pfc/surd.hpp"

namespace pfc {

template <class S>
S abs_value(const S& x) {
  return sign(x) < 0 ? S(-x) : x;
}

/// Piecewise-affine function on the circle [0, 1) with jumps, the exact
/// carrier for BV computations. Knots 0 = x_0 < x_1 < ... < x_{n-1} < 1
/// each store the point value f(x_i) and the one-sided limits f(x_i+) and
/// f(x_{i+1}-) of the affine piece that follows (x_n = 1 wraps to 0).
/// Point values may differ from both limits (e.g. the zeros of g on S).
///
/// S is a field with exact sign(): Rational or QuadSurd.
template <class S>
class JumpPLFunction {
 public:
  struct Knot {
    Rational x;
    S value;      // f(x)
    S right;      // f(x+)
    S next_left;  // f(x_next-)
  };

  JumpPLFunction() : JumpPLFunction(constant(S(0))) {}

  explicit JumpPLFunction(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.empty() || knots_.front().x != 0) throw std::invalid_argument("first knot must sit at 0");
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (knots_[i].x <= knots_[i - 1].x) throw std::invalid_argument("knots must be strictly increasing");
    if (knots_.back().x >= 1) throw std::invalid_argument("knots must lie in [0, 1)");
  }

  /// c everywhere, point values included.
  static JumpPLFunction constant(const S& c) { return JumpPLFunction({Knot{Rational(0), c, c, c}}); }

  /// sum_k values[k] 1_{I_k} with I_k = (k/q, (k+1)/q), zero on the grid.
  static JumpPLFunction step(std::span<const S> values) {
    const long q = static_cast<long>(values.size());
    std::vector<Knot> knots;
    for (long k = 0; k < q; ++k) knots.push_back(Knot{make_rational(k, q), S(0), values[k], values[k]});
    return JumpPLFunction(std::move(knots));
  }

  /// Continuous periodic piecewise-linear interpolant through (xs[i], ys[i]).
  static JumpPLFunction interpolant(std::span<const Rational> xs, std::span<const S> ys) {
    if (xs.size() != ys.size() || xs.empty()) throw std::invalid_argument("interpolant: size mismatch");
    std::vector<Knot> knots;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const S& next = ys[(i + 1) % ys.size()];
      knots.push_back(Knot{xs[i], ys[i], ys[i], next});
    }
    return JumpPLFunction(std::move(knots));
  }

  /// Builds a function on the given knots from pointwise accessors:
  /// point(x), right(x) for x in [0,1), left(x) for x in (0,1].
  template <class Point, class Right, class Left>
  static JumpPLFunction sample(std::vector<Rational> xs, Point&& point, Right&& right, Left&& left) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (xs.empty() || xs.front() != 0) xs.insert(xs.begin(), Rational(0));
    std::vector<Knot> knots;
    knots.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Rational next = i + 1 < xs.size() ? xs[i + 1] : Rational(1);
      knots.push_back(Knot{xs[i], point(xs[i]), right(xs[i]), left(next)});
    }
    return JumpPLFunction(std::move(knots));
  }

  const std::vector<Knot>& knots() const { return knots_; }
  std::vector<Rational> knot_positions() const {
    std::vector<Rational> xs;
    xs.reserve(knots_.size());
    for (const auto& k : knots_) xs.push_back(k.x);
    return xs;
  }

  /// f(x) for x in [0, 1]; f(1) = f(0).
  S point(const Rational& x) const {
    if (x == 1) return knots_.front().value;
    std::size_t i = last_at_or_before(x);
    if (knots_[i].x == x) return knots_[i].value;
    return interpolate(i, x);
  }

  /// f(x+) for x in [0, 1).
  S right_limit(const Rational& x) const {
    std::size_t i = last_at_or_before(x);
    if (knots_[i].x == x) return knots_[i].right;
    return interpolate(i, x);
  }

  /// f(x-) for x in (0, 1]; x = 0 is read as 1.
  S left_limit(const Rational& x) const {
    const Rational& at = x == 0 ? one() : x;
    std::size_t i = last_before(at);
    if (end_of(i) == at) return knots_[i].next_left;
    return interpolate(i, at);
  }

  /// Pointwise variation around the circle.
  S variation() const {
    S total(0);
    const std::size_t n = knots_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Knot& k = knots_[i];
      const S& before = knots_[(i + n - 1) % n].next_left;
      total += abs_value(S(k.next_left - k.right));
      total += abs_value(S(k.value - before));
      total += abs_value(S(k.right - k.value));
    }
    return total;
  }

  /// Pointwise variation over the closed interval [a, b] in [0, 1].
  S variation_on(const Rational& a, const Rational& b) const {
    if (!(a < b) || a < 0 || b > 1) throw std::invalid_argument("variation_on needs 0 <= a < b <= 1");
    std::vector<Rational> ts{a};
    for (const auto& k : knots_)
      if (k.x > a && k.x < b) ts.push_back(k.x);
    ts.push_back(b);
    S total = abs_value(S(right_limit(a) - point(a)));
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      total += abs_value(S(left_limit(ts[i + 1]) - right_limit(ts[i])));
      if (i + 2 < ts.size()) {
        const Rational& t = ts[i + 1];
        S v = point(t);
        total += abs_value(S(v - left_limit(t)));
        total += abs_value(S(right_limit(t) - v));
      }
    }
    total += abs_value(S(point(b) - left_limit(b)));
    return total;
  }

  /// Lebesgue integral over [0, 1).
  S integral() const {
    S total(0);
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      const Knot& k = knots_[i];
      total += S(k.right + k.next_left) * S(Rational((end_of(i) - k.x) / 2));
    }
    return total;
  }

  S l1_norm() const {
    S total(0);
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      const Knot& k = knots_[i];
      S width(Rational(end_of(i) - k.x));
      int sr = sign(k.right);
      int sl = sign(k.next_left);
      if (sr * sl >= 0) {
        total += abs_value(S(k.right + k.next_left)) * width / S(2);
      } else {
        // sign change inside the piece
        S num = k.right * k.right + k.next_left * k.next_left;
        total += num * width / (S(2) * abs_value(S(k.right - k.next_left)));
      }
    }
    return total;
  }

  /// |||f||| = var(f) + ||f||_1.
  S bv_norm() const { return variation() + l1_norm(); }

  /// Supremum of |f|, attained at a knot value or a one-sided limit.
  double sup_norm() const {
    double m = 0;
    for (const auto& k : knots_) {
      m = std::max({m, std::abs(to_double(k.value)), std::abs(to_double(k.right)), std::abs(to_double(k.next_left))});
    }
    return m;
  }

  JumpPLFunction scaled(const S& c) const {
    JumpPLFunction out = *this;
    for (auto& k : out.knots_) {
      k.value *= c;
      k.right *= c;
      k.next_left *= c;
    }
    return out;
  }

  friend JumpPLFunction operator+(const JumpPLFunction& f, const JumpPLFunction& g) {
    return combine(f, g, [](const S& a, const S& b) { return S(a + b); });
  }
  friend JumpPLFunction operator-(const JumpPLFunction& f, const JumpPLFunction& g) {
    return combine(f, g, [](const S& a, const S& b) { return S(a - b); });
  }

  /// f * 1_[a,b] for the closed interval [a, b] in [0, 1]; with b = 1 the
  /// point 0 (= 1 on the circle) is kept.
  JumpPLFunction restricted(const Rational& a, const Rational& b) const {
    std::vector<Rational> xs = knot_positions();
    xs.push_back(a);
    if (b < 1) xs.push_back(b);
    auto in_closed = [&](const Rational& x) { return (a <= x && x <= b) || (x == 0 && b == 1); };
    return sample(
        std::move(xs), [&](const Rational& x) { return in_closed(x) ? point(x) : S(0); },
        [&](const Rational& x) { return (a <= x && x < b) ? right_limit(x) : S(0); },
        [&](const Rational& x) { return (a < x && x <= b) ? left_limit(x) : S(0); });
  }

  template <class T>
  JumpPLFunction<T> cast() const {
    std::vector<typename JumpPLFunction<T>::Knot> knots;
    knots.reserve(knots_.size());
    for (const auto& k : knots_) knots.push_back({k.x, T(k.value), T(k.right), T(k.next_left)});
    return JumpPLFunction<T>(std::move(knots));
  }

 private:
  static const Rational& one() {
    static const Rational kOne(1);
    return kOne;
  }

  const Rational& end_of(std::size_t i) const { return i + 1 < knots_.size() ? knots_[i + 1].x : one(); }

  std::size_t last_at_or_before(const Rational& x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](const Rational& v, const Knot& k) { return v < k.x; });
    return static_cast<std::size_t>(std::distance(knots_.begin(), it)) - 1;
  }

  std::size_t last_before(const Rational& x) const {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), x, [](const Knot& k, const Rational& v) { return k.x < v; });
    return static_cast<std::size_t>(std::distance(knots_.begin(), it)) - 1;
  }

  S interpolate(std::size_t i, const Rational& x) const {
    const Knot& k = knots_[i];
    Rational t = (x - k.x) / (end_of(i) - k.x);
    return k.right + S(k.next_left - k.right) * S(t);
  }

  template <class Op>
  static JumpPLFunction combine(const JumpPLFunction& f, const JumpPLFunction& g, Op op) {
    std::vector<Rational> xs = f.knot_positions();
    for (const auto& k : g.knots_) xs.push_back(k.x);
    return sample(
        std::move(xs), [&](const Rational& x) { return op(f.point(x), g.point(x)); },
        [&](const Rational& x) { return op(f.right_limit(x), g.right_limit(x)); },
        [&](const Rational& x) { return op(f.left_limit(x), g.left_limit(x)); });
  }

  std::vector<Knot> knots_;
};

/// True when f and g agree as functions (point values and both one-sided
/// limits everywhere), regardless of redundant knots.
template <class S>
bool same_function(const JumpPLFunction<S>& f, const JumpPLFunction<S>& g) {
  std::vector<Rational> xs = f.knot_positions();
  for (const auto& k : g.knots()) xs.push_back(k.x);
  for (const auto& x : xs) {
    if (f.point(x) != g.point(x) || f.right_limit(x) != g.right_limit(x) || f.left_limit(x) != g.left_limit(x))
      return false;
  }
  return true;
}

/// Floating-point view of a JumpPLFunction for quadrature and mollified
/// operators.
class JumpPLDouble {
 public:
  template <class S>
  explicit JumpPLDouble(const JumpPLFunction<S>& f) {
    for (const auto& k : f.knots()) {
      xs_.push_back(to_double(k.x));
      value_.push_back(to_double(k.value));
      right_.push_back(to_double(k.right));
      next_left_.push_back(to_double(k.next_left));
    }
  }

  /// Evaluation off the knots (knot point values are measure zero for
  /// every use of this view); x is reduced mod 1.
  double operator()(double x) const {
    x -= std::floor(x);
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(std::distance(xs_.begin(), it)) - 1;
    double end = i + 1 < xs_.size() ? xs_[i + 1] : 1.0;
    double t = (x - xs_[i]) / (end - xs_[i]);
    return right_[i] + (next_left_[i] - right_[i]) * t;
  }

  const std::vector<double>& knots() const { return xs_; }

 private:
  std::vector<double> xs_, value_, right_, next_left_;
};

}  // namespace pfc

#endif  // PFC_JUMP_FUNCTION_HPP
