#ifndef PFC_MOLLIFIER_HPP
#define PFC_MOLLIFIER_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pfc/circlemap.hpp"
#include "pfc/jump_function.hpp"

namespace pfc {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Standard normal CDF and density.
inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }
inline double normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }

struct MollifierOptions {
  double newton_tol = 1e-14;
  /// Breakpoints farther than tail_cutoff * delta are dropped; the
  /// discarded Gaussian tail is below Phi(-tail_cutoff).
  double tail_cutoff = 12.0;
  int max_newton_iter = 200;
};

/// Lift convolved with the Gaussian of width delta: tau_delta is the
/// primitive of tau' * phi_delta normalized by tau_delta(0) = 0.
///
/// Writing tau' = s + sum_c J_c H(x - c) over the periodic breaks c with
/// jumps J_c, the convolution only changes tau' within a few delta of each
/// break, by J_c (Phi((x-c)/delta) - H(x-c)); integrating gives the
/// correction delta J_c [Psi((x-c)/delta) - Psi(-c/delta)] to tau with the
/// even function Psi(t) = phi(t) - |t| Phi(-|t|).
class MollifiedLift {
 public:
  MollifiedLift(const PiecewiseLinearLift& base, double delta, MollifierOptions options = {});

  const PiecewiseLinearLift& base() const { return base_; }
  double delta() const { return delta_; }
  long period() const { return p_; }
  const MollifierOptions& options() const { return options_; }
  /// Number of periodic images on each side that can reach a point.
  int image_count() const { return images_; }

  double dtau(double x) const;
  double tau(double x) const;
  /// Safeguarded Newton; throws ConvergenceError if newton_tol is not met.
  double tau_inv(double y) const;

  /// T_delta(x) = tau_delta^{-1}(x) mod 1.
  double map_T(double x) const;
  /// g_delta(y) = tau_delta'(tau_delta^{-1}(y)) = 1 / |T_delta'(y)|.
  double weight(double y) const;

  double base_tau(double x) const;
  double base_tau_inv(double y) const;
  /// Right-continuous slope of the unmollified lift.
  double base_dtau(double x) const;

 private:
  double reduce(double x, double& shift) const;

  PiecewiseLinearLift base_;
  double delta_;
  long p_;
  MollifierOptions options_;
  int images_ = 1;
  std::vector<double> breaks_, slopes_, values_, jumps_;
};

inline double eval_dtau_delta(const MollifiedLift& m, double x) { return m.dtau(x); }
inline double eval_tau_delta(const MollifiedLift& m, double x) { return m.tau(x); }
inline double eval_tau_delta_inv(const MollifiedLift& m, double y) { return m.tau_inv(y); }

/// (P_delta f)(x) = sum_j tau_delta'(x+j) f(tau_delta(x+j) mod 1).
double apply_P_delta(const MollifiedLift& m, const std::function<double(double)>& f, double x);

/// (P_delta^n f)(x) by recursion over the p^n preimages.
double apply_P_delta_n(const MollifiedLift& m, const std::function<double(double)>& f, int n, double x);

struct ApproxBound {
  double delta = 0;
  double lhs = 0;              // int_0^1 |P_delta f - P f|
  double rhs = 0;              // 2 C0 delta |||f|||
  double c0_est = 0;           // max of the two quantities below
  double c0_inverse = 0;       // sup |tau_delta^{-1} - tau^{-1}| / delta
  double c0_derivative = 0;    // int_0^p |tau_delta' - tau'| / delta
  double bv_norm = 0;
  bool holds() const { return lhs <= rhs; }
};

struct C0Estimate {
  double inverse = 0;
  double derivative = 0;
  double value() const { return std::max(inverse, derivative); }
};

C0Estimate estimate_c0(const MollifiedLift& m);

ApproxBound approx_bound_check(const PiecewiseLinearLift& lift, double delta, const JumpPLFunction<Rational>& f,
                               MollifierOptions options = {});
/// Same check with the mollified lift and its C0 estimate computed once.
ApproxBound approx_bound_check(const MollifiedLift& m, const C0Estimate& c0, const JumpPLFunction<QuadSurd>& f);
ApproxBound approx_bound_check(const PiecewiseLinearLift& lift, double delta, const JumpPLFunction<QuadSurd>& f,
                               MollifierOptions options = {});

struct DerivativeDelta {
  double inf_derivative = 0;  // grid min of |(T_delta^k)'|
  double theta = 0;           // inf^{-1/k}
};

/// Grid minimum of |(T_delta^k)'| over grid_points equispaced points
/// (default 2^14 k), following each orbit through tau_delta^{-1}.
DerivativeDelta derivative_inf_delta(const MollifiedLift& m, int k, long grid_points = 0);

/// theta_k for k = 1..k_max from a shared grid of 2^14 k_max points.
std::vector<double> theta_profile_delta(const MollifiedLift& m, int k_max, long grid_points = 0);

}  // namespace pfc

#endif  // PFC_MOLLIFIER_HPP
