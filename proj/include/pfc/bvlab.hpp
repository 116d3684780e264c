#ifndef PFC_BVLAB_HPP
#define PFC_BVLAB_HPP

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "pfc/circlemap.hpp"
#include "pfc/jump_function.hpp"
#include "pfc/mollifier.hpp"
#include "pfc/rational.hpp"
#include "pfc/surd.hpp"

namespace pfc {

namespace detail {

// Slope of the piece to the left of z, for z in (0, p].
inline const Rational& left_slope(const PiecewiseLinearLift& lift, const Rational& z) {
  const auto& b = lift.breaks();
  auto it = std::lower_bound(b.begin(), b.end(), z);
  return lift.slopes()[static_cast<std::size_t>(std::distance(b.begin(), it)) - 1];
}

}  // namespace detail

/// Exact transfer operator Pf(x) = sum_j tau'(x+j) f(tau(x+j)), with the
/// weight taken as 0 wherever x + j is a break (g = 0 on S). The result
/// has knots at C and at the T-images of the knots of f.
template <class S>
JumpPLFunction<S> apply_P(const PiecewiseLinearLift& lift, const JumpPLFunction<S>& f) {
  const long p = lift.period();
  std::vector<Rational> xs = critical_images(lift);
  for (const auto& k : f.knots()) xs.push_back(frac(lift.tau_inverse(k.x)));

  auto point = [&](const Rational& x) {
    S total(0);
    for (long j = 0; j < p; ++j) {
      Rational z = x + j;
      if (lift.is_break(z)) continue;
      total += S(lift.slope_at(z)) * f.point(lift.tau(z));
    }
    return total;
  };
  auto right = [&](const Rational& x) {
    S total(0);
    for (long j = 0; j < p; ++j) {
      Rational z = x + j;
      total += S(lift.slope_at(z)) * f.right_limit(lift.tau(z));
    }
    return total;
  };
  auto left = [&](const Rational& x) {
    S total(0);
    for (long j = 0; j < p; ++j) {
      Rational z = x + j;
      total += S(detail::left_slope(lift, z)) * f.left_limit(lift.tau(z));
    }
    return total;
  };
  return JumpPLFunction<S>::sample(std::move(xs), point, right, left);
}

template <class S>
JumpPLFunction<S> apply_P_n(const PiecewiseLinearLift& lift, JumpPLFunction<S> f, int n) {
  for (int i = 0; i < n; ++i) f = apply_P(lift, f);
  return f;
}

/// g_N as an explicit function: the plateau weight on each N-cylinder and
/// 0 at the cylinder endpoints.
JumpPLFunction<Rational> weight_pullback(const PiecewiseLinearLift& lift, int N);

/// ||g_N||_inf, the largest slope product over N-cylinders.
Rational sup_gN(const PiecewiseLinearLift& lift, int N);

/// var(g_N) = 2 * (sum of the plateau values), every plateau being
/// flanked by zeros at points of S_N.
Rational var_gN(const PiecewiseLinearLift& lift, int N);

/// Greedy partition of the circle into closed arcs between plateau
/// midpoints of g_N, each arc closed just before its variation would
/// exceed cap.
struct GreedyPartition {
  std::size_t atoms = 0;
  Rational max_variation;    // max_A var_A(g_N)
  Rational D;                // max_A var_A(g_N) / m(A)
};
GreedyPartition greedy_partition(const PiecewiseLinearLift& lift, int N, const Rational& cap);

struct LYConstants {
  Rational kappa;
  int M = 0;
  Rational lambda;                 // lambda_N, the same for all N
  std::vector<Rational> sup_g;     // ||g_N||, N = 1..M
  std::vector<Rational> D_list;    // D_N, N = 1..M
  std::vector<std::size_t> atoms;  // |alpha_N|
  Rational D;
  Rational F;
  double theta_upper = 0;  // min_{N <= 10} ||g_N||^{1/N}
};

/// Raised when kappa does not exceed the contraction rate of g_N.
class KappaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Smallest M with 2 ||g_M|| < kappa^M (searched up to max_M), lambda = 3,
/// D_N from greedy_partition with cap lambda - ||g_N||, and
/// F = max{D / (1 - kappa^M), lambda / kappa^(M-1)}.
LYConstants ly_constants(const PiecewiseLinearLift& lift, const Rational& kappa, int max_M = 40);

nlohmann::json ly_constants_json(const LYConstants& c);

struct LYCheck {
  int n = 0;
  double lhs = 0;  // var(P^n f)
  double rhs = 0;  // F (kappa^n var f + ||f||_1)
  double slack = 0;
  bool exact = true;
  bool holds = false;
};

nlohmann::json ly_check_json(const LYCheck& c);

/// LY checks for n = 1..n_max along one exact orbit P f, P^2 f, ...
template <class S>
std::vector<LYCheck> check_ly_orbit(const PiecewiseLinearLift& lift, const JumpPLFunction<S>& f, int n_max,
                                    const LYConstants& c) {
  const S var_f = f.variation();
  const S l1_f = f.l1_norm();
  std::vector<LYCheck> out;
  JumpPLFunction<S> h = f;
  Rational kn(1);
  for (int n = 1; n <= n_max; ++n) {
    h = apply_P(lift, h);
    kn *= c.kappa;
    S lhs = h.variation();
    S rhs = S(c.F) * (S(kn) * var_f + l1_f);
    S slack = rhs - lhs;
    LYCheck r;
    r.n = n;
    r.lhs = to_double(lhs);
    r.rhs = to_double(rhs);
    r.slack = to_double(slack);
    r.holds = sign(slack) >= 0;
    out.push_back(r);
  }
  return out;
}

template <class S>
LYCheck check_ly(const PiecewiseLinearLift& lift, const JumpPLFunction<S>& f, int n, const LYConstants& c) {
  if (n < 1) throw std::invalid_argument("check_ly needs n >= 1");
  return check_ly_orbit(lift, f, n, c).back();
}

/// LY check for the mollified operator. The left side is the variation of
/// P_delta^n f sampled on 2^grid_log2 points, a lower bound of the true
/// variation; a failing grid is refined fourfold before being reported.
LYCheck check_ly_delta(const MollifiedLift& m, const JumpPLFunction<Rational>& f, int n, const LYConstants& c,
                       int grid_log2 = 11);

/// sum over closed n-cylinders B of var(P^n (f 1_B)), against the bound
/// F (kappa^n var f + ||f||_1).
struct CylinderSum {
  int n = 0;
  std::size_t cylinders = 0;
  Rational lhs;
  Rational rhs;
  bool holds() const { return lhs <= rhs; }
};
CylinderSum cylinder_sum_check(const PiecewiseLinearLift& lift, const JumpPLFunction<Rational>& f, int n,
                               const LYConstants& c);

/// Random rational jump function with at most max_knots knots at rational
/// positions, independent one-sided limits and point values. Only
/// rng() % k is used, so a seed gives the same function on every platform.
JumpPLFunction<Rational> random_jump_function(std::mt19937_64& rng, int max_knots = 20);

/// Continuous piecewise-linear interpolant of a smooth periodic function on
/// a uniform grid, values rounded to doubles and stored exactly. The
/// bounds follow from h^2/8 max|f''| (sup) and h max|f''| (variation).
struct Interpolant {
  JumpPLFunction<Rational> f;
  double sup_error = 0;
  double var_error = 0;
};
Interpolant trig_interpolant(const std::function<double(double)>& f, double second_derivative_bound, int grid = 4096);

/// lambda_2^{-n} P^n (f - m(f)), the power-iteration surrogate of the
/// spectral projector onto the lambda_2 eigenspace. The increment
/// sup |h_n - h_{n-1}| of consecutive iterates is the error proxy.
struct Phi2Projection {
  JumpPLFunction<QuadSurd> value;
  int n = 0;
  double sup_norm = 0;
  double increment = 0;
  std::vector<double> increments;  // per iteration, for the divergence check
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class S>
Phi2Projection project_phi2(const PiecewiseLinearLift& lift, const JumpPLFunction<S>& f, int n);

extern template Phi2Projection project_phi2<Rational>(const PiecewiseLinearLift&, const JumpPLFunction<Rational>&,
                                                      int);
extern template Phi2Projection project_phi2<QuadSurd>(const PiecewiseLinearLift&, const JumpPLFunction<QuadSurd>&,
                                                      int);

/// Step eigenfunction of the largest simple real eigenvalue other than 1
/// and 0 of the transition matrix, when the map is Markov on some grid and
/// that eigenvalue is exact in Q(sqrt d).
struct StepEigenpair {
  QuadSurd value;
  JumpPLFunction<QuadSurd> function;
};
std::optional<StepEigenpair> subdominant_step_eigenfunction(const PiecewiseLinearLift& lift);

struct NamedFunction {
  std::string name;
  JumpPLFunction<QuadSurd> f;
};

/// Ten test functions: the constant 1, the subdominant step eigenfunction
/// (or 1_[1/4,3/4] without one), a sawtooth, an indicator, a hat, a
/// sampled cosine and four seeded random jump functions.
std::vector<NamedFunction> function_battery(const PiecewiseLinearLift& lift, std::uint64_t seed = 13);

}  // namespace pfc

#endif  // PFC_BVLAB_HPP
