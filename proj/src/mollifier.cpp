#include "pfc/mollifier.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "pfc/bvlab.hpp"

namespace pfc {

namespace {

// Phi(t) - H(t), the change a unit step undergoes under convolution.
double step_correction(double t) { return t >= 0 ? -normal_cdf(-t) : normal_cdf(t); }

// Primitive of step_correction vanishing at +-infinity.
double step_primitive(double t) {
  double a = std::abs(t);
  return normal_pdf(a) - a * normal_cdf(-a);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 6, 1e-11);
}

// Integral of f over [a, b], split at the cut points and, within
// zone_halfwidth of each center, into panels no wider than panel. Away
// from the centers the integrand is smooth on each piece between cuts.
double integrate_split(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts,
                       const std::vector<double>& centers, double zone_halfwidth, double panel) {
  int per_side = static_cast<int>(std::ceil(zone_halfwidth / panel));
  for (double c : centers)
    for (int k = -per_side; k <= per_side; ++k) cuts.push_back(c + k * panel);
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0;
  double left = a;
  for (double c : cuts) {
    if (c <= left) continue;
    if (c > b) c = b;
    total += integrate(f, left, c);
    left = c;
    if (left >= b) break;
  }
  return total;
}

}  // namespace

MollifiedLift::MollifiedLift(const PiecewiseLinearLift& base, double delta, MollifierOptions options)
    : base_(base), delta_(delta), p_(base.period()), options_(options) {
  if (!(delta > 0) || !std::isfinite(delta)) throw std::invalid_argument("mollification width must be positive");
  if (!(options.newton_tol > 0)) throw std::invalid_argument("newton tolerance must be positive");
  if (!(options.tail_cutoff > 0)) throw std::invalid_argument("tail cutoff must be positive");
  images_ = static_cast<int>(std::ceil(options.tail_cutoff * delta / static_cast<double>(p_))) + 1;
  const auto& b = base.breaks();
  const auto& s = base.slopes();
  const auto& v = base.break_values();
  const std::size_t K = s.size();
  for (std::size_t k = 0; k <= K; ++k) {
    breaks_.push_back(b[k].get_d());
    values_.push_back(v[k].get_d());
  }
  for (std::size_t k = 0; k < K; ++k) {
    slopes_.push_back(s[k].get_d());
    Rational jump = s[k] - s[(k + K - 1) % K];
    jumps_.push_back(jump.get_d());
  }
}

double MollifiedLift::reduce(double x, double& shift) const {
  double m = std::floor(x / static_cast<double>(p_));
  double r = x - m * static_cast<double>(p_);
  if (r >= static_cast<double>(p_)) {
    r -= static_cast<double>(p_);
    m += 1;
  }
  if (r < 0) r = 0;
  shift = m;
  return r;
}

double MollifiedLift::base_dtau(double x) const {
  double m;
  double r = reduce(x, m);
  auto it = std::upper_bound(breaks_.begin(), breaks_.end() - 1, r);
  return slopes_[static_cast<std::size_t>(std::distance(breaks_.begin(), it)) - 1];
}

double MollifiedLift::base_tau(double x) const {
  double m;
  double r = reduce(x, m);
  auto it = std::upper_bound(breaks_.begin(), breaks_.end() - 1, r);
  auto k = static_cast<std::size_t>(std::distance(breaks_.begin(), it)) - 1;
  return values_[k] + slopes_[k] * (r - breaks_[k]) + m;
}

double MollifiedLift::base_tau_inv(double y) const {
  double m = std::floor(y);
  double r = y - m;
  auto it = std::upper_bound(values_.begin(), values_.end() - 1, r);
  auto k = static_cast<std::size_t>(std::distance(values_.begin(), it)) - 1;
  return breaks_[k] + (r - values_[k]) / slopes_[k] + m * static_cast<double>(p_);
}

double MollifiedLift::dtau(double x) const {
  double m;
  double r = reduce(x, m);
  double out = base_dtau(r);
  const double reach = options_.tail_cutoff * delta_;
  const double p = static_cast<double>(p_);
  for (int j = -images_; j <= images_; ++j) {
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      double c = breaks_[k] + j * p;
      double t = r - c;
      if (std::abs(t) <= reach) out += jumps_[k] * step_correction(t / delta_);
    }
  }
  return out;
}

double MollifiedLift::tau(double x) const {
  double m;
  double r = reduce(x, m);
  double out = base_tau(r);
  const double reach = options_.tail_cutoff * delta_;
  const double p = static_cast<double>(p_);
  double corr = 0;
  for (int j = -images_; j <= images_; ++j) {
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      double c = breaks_[k] + j * p;
      if (std::abs(r - c) <= reach) corr += jumps_[k] * step_primitive((r - c) / delta_);
      if (std::abs(c) <= reach) corr -= jumps_[k] * step_primitive(-c / delta_);
    }
  }
  return out + delta_ * corr + m;
}

double MollifiedLift::tau_inv(double y) const {
  double m = std::floor(y);
  double target = y - m;
  const double p = static_cast<double>(p_);
  if (target == 0) return m * p;
  double lo = 0, hi = p;
  double x = std::clamp(base_tau_inv(target), lo, hi);
  for (int it = 0; it < options_.max_newton_iter; ++it) {
    double f = tau(x) - target;
    if (std::abs(f) < options_.newton_tol) return x + m * p;
    if (f > 0) {
      hi = x;
    } else {
      lo = x;
    }
    double next = x - f / dtau(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * p) return next + m * p;
    x = next;
  }
  throw ConvergenceError("tau_delta inversion did not reach tolerance at y=" + std::to_string(y));
}

double MollifiedLift::map_T(double x) const {
  double z = tau_inv(x - std::floor(x));
  return z - std::floor(z);
}

double MollifiedLift::weight(double y) const { return dtau(tau_inv(y - std::floor(y))); }

double apply_P_delta(const MollifiedLift& m, const std::function<double(double)>& f, double x) {
  double out = 0;
  for (long j = 0; j < m.period(); ++j) {
    double z = x + static_cast<double>(j);
    double y = m.tau(z);
    out += m.dtau(z) * f(y - std::floor(y));
  }
  return out;
}

double apply_P_delta_n(const MollifiedLift& m, const std::function<double(double)>& f, int n, double x) {
  if (n == 0) return f(x - std::floor(x));
  double out = 0;
  for (long j = 0; j < m.period(); ++j) {
    double z = x + static_cast<double>(j);
    double y = m.tau(z);
    out += m.dtau(z) * apply_P_delta_n(m, f, n - 1, y - std::floor(y));
  }
  return out;
}

C0Estimate estimate_c0(const MollifiedLift& m) {
  const double delta = m.delta();
  const double p = static_cast<double>(m.period());
  C0Estimate est;

  // sup over a uniform grid refined around the images of the breaks,
  // where tau^{-1} has its kinks
  std::vector<double> ys;
  const int uniform = 1 << 14;
  for (int i = 0; i < uniform; ++i) ys.push_back(static_cast<double>(i) / uniform);
  for (const auto& b : m.base().break_values()) {
    double s = b.get_d();
    for (int i = -200; i <= 200; ++i) ys.push_back(s + 6.0 * delta * i / 200.0);
  }
  for (double y : ys) {
    double diff = std::abs(m.tau_inv(y) - m.base_tau_inv(y));
    est.inverse = std::max(est.inverse, diff / delta);
  }

  std::vector<double> cuts;
  for (const auto& b : m.base().breaks()) cuts.push_back(b.get_d());
  std::vector<double> centers = cuts;
  for (const auto& b : m.base().breaks()) {
    centers.push_back(b.get_d() - p);
    centers.push_back(b.get_d() + p);
  }
  const double reach = m.options().tail_cutoff * delta;
  double integral = integrate_split([&](double x) { return std::abs(m.dtau(x) - m.base_dtau(x)); }, 0.0, p, cuts,
                                    centers, reach, delta);
  est.derivative = integral / delta;
  return est;
}

namespace {

template <class S>
ApproxBound approx_bound_impl(const MollifiedLift& m, const C0Estimate& c0, const JumpPLFunction<S>& f) {
  const double delta = m.delta();
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("approximation bound needs delta in (0, 1)");
  const PiecewiseLinearLift& lift = m.base();
  const MollifierOptions& options = m.options();
  JumpPLFunction<S> pf = apply_P(lift, f);
  JumpPLDouble f_view(f), pf_view(pf);

  std::vector<double> cuts;
  for (const auto& k : pf.knots()) cuts.push_back(to_double(k.x));
  for (double x : f_view.knots()) cuts.push_back(m.map_T(x));

  auto fd = [&](double y) { return f_view(y); };
  auto integrand = [&](double x) { return std::abs(apply_P_delta(m, fd, x) - pf_view(x)); };

  ApproxBound out;
  out.delta = delta;
  std::vector<double> centers;
  for (const auto& c : critical_images(lift))
    for (int shift = -1; shift <= 1; ++shift) centers.push_back(c.get_d() + shift);
  out.lhs = integrate_split(integrand, 0.0, 1.0, cuts, centers, options.tail_cutoff * delta, 0.5 * delta);
  out.c0_inverse = c0.inverse;
  out.c0_derivative = c0.derivative;
  out.c0_est = c0.value();
  out.bv_norm = to_double(f.bv_norm());
  out.rhs = 2 * out.c0_est * delta * out.bv_norm;
  return out;
}

template <class S>
ApproxBound approx_bound_fresh(const PiecewiseLinearLift& lift, double delta, const JumpPLFunction<S>& f,
                               MollifierOptions options) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("approximation bound needs delta in (0, 1)");
  MollifiedLift m(lift, delta, options);
  return approx_bound_impl(m, estimate_c0(m), f);
}

}  // namespace

ApproxBound approx_bound_check(const PiecewiseLinearLift& lift, double delta, const JumpPLFunction<Rational>& f,
                               MollifierOptions options) {
  return approx_bound_fresh(lift, delta, f, options);
}

ApproxBound approx_bound_check(const PiecewiseLinearLift& lift, double delta, const JumpPLFunction<QuadSurd>& f,
                               MollifierOptions options) {
  return approx_bound_fresh(lift, delta, f, options);
}

ApproxBound approx_bound_check(const MollifiedLift& m, const C0Estimate& c0, const JumpPLFunction<QuadSurd>& f) {
  return approx_bound_impl(m, c0, f);
}

std::vector<double> theta_profile_delta(const MollifiedLift& m, int k_max, long grid_points) {
  if (k_max < 1) throw std::invalid_argument("derivative depth must be >= 1");
  if (grid_points <= 0) grid_points = (1L << 14) * k_max;
  std::vector<double> min_log(static_cast<std::size_t>(k_max), std::numeric_limits<double>::infinity());
  for (long i = 0; i < grid_points; ++i) {
    double x = static_cast<double>(i) / static_cast<double>(grid_points);
    double log_derivative = 0;
    for (int k = 0; k < k_max; ++k) {
      double z = m.tau_inv(x);
      log_derivative -= std::log(m.dtau(z));
      min_log[static_cast<std::size_t>(k)] = std::min(min_log[static_cast<std::size_t>(k)], log_derivative);
      x = z - std::floor(z);
    }
  }
  std::vector<double> theta;
  for (int k = 1; k <= k_max; ++k) theta.push_back(std::exp(-min_log[static_cast<std::size_t>(k - 1)] / k));
  return theta;
}

DerivativeDelta derivative_inf_delta(const MollifiedLift& m, int k, long grid_points) {
  if (k < 1) throw std::invalid_argument("derivative depth must be >= 1");
  if (grid_points <= 0) grid_points = (1L << 14) * k;
  double min_log = std::numeric_limits<double>::infinity();
  for (long i = 0; i < grid_points; ++i) {
    double x = static_cast<double>(i) / static_cast<double>(grid_points);
    double log_derivative = 0;
    for (int step = 0; step < k; ++step) {
      double z = m.tau_inv(x);
      log_derivative -= std::log(m.dtau(z));
      x = z - std::floor(z);
    }
    min_log = std::min(min_log, log_derivative);
  }
  DerivativeDelta out;
  out.inf_derivative = std::exp(min_log);
  out.theta = std::exp(-min_log / k);
  return out;
}

}  // namespace pfc
