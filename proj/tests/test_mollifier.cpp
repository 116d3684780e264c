#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pfc/bvlab.hpp"
#include "pfc/mollifier.hpp"
#include "pfc/steptransfer.hpp"

using namespace pfc;

namespace {

// The convolution written out piece by piece over enough periodic images.
double literal_dtau(const PiecewiseLinearLift& lift, double delta, double x) {
  const auto& b = lift.breaks();
  const auto& s = lift.slopes();
  const double p = static_cast<double>(lift.period());
  const int K = static_cast<int>(std::ceil(12 * delta / p)) + 1;
  double total = 0;
  for (std::size_t k = 0; k < s.size(); ++k)
    for (int j = -K; j <= K; ++j)
      total += s[k].get_d() * (normal_cdf((x - b[k].get_d() - j * p) / delta) -
                               normal_cdf((x - b[k + 1].get_d() - j * p) / delta));
  return total;
}

double quadrature_tau(const PiecewiseLinearLift& lift, double delta, double x) {
  auto f = [&](double u) { return literal_dtau(lift, delta, u); };
  double lo = std::min(0.0, x), hi = std::max(0.0, x);
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / (0.25 * delta))));
  double total = 0;
  for (int i = 0; i < panels; ++i) {
    double a = lo + (hi - lo) * i / panels, c = lo + (hi - lo) * (i + 1) / panels;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, c, 0);
  }
  return x >= 0 ? total : -total;
}

JumpPLFunction<QuadSurd> phi_v2() {
  SquareMatrix<Rational> m = transition_matrix(keller_rugh(), 6).entries;
  return JumpPLFunction<QuadSurd>::step(left_eigenvector(m, lambda2()));
}

}  // namespace

TEST_CASE("closed-form derivative matches the literal convolution") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-3.0, 5.0);
  for (double delta : {0.1, 0.01, 0.001}) {
    MollifiedLift m(keller_rugh(), delta);
    for (int i = 0; i < 100; ++i) {
      double x = u(rng);
      CHECK(std::abs(m.dtau(x) - literal_dtau(keller_rugh(), delta, x)) < 1e-12);
    }
  }
}

TEST_CASE("closed-form primitive matches quadrature") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  for (double delta : {0.1, 0.05}) {
    MollifiedLift m(keller_rugh(), delta);
    for (int i = 0; i < 100; ++i) {
      double x = u(rng);
      CHECK(std::abs(m.tau(x) - quadrature_tau(keller_rugh(), delta, x)) < 1e-12);
    }
  }
}

TEST_CASE("normalization and periodicity") {
  for (double delta : {0.1, 0.01, 0.001}) {
    MollifiedLift m(keller_rugh(), delta);
    CHECK(m.tau(0.0) == 0.0);
    CHECK(std::abs(m.tau(2.0) - 1.0) < 1e-14);
    for (int i = 0; i < 50; ++i) {
      double x = -2.0 + 0.0937 * i;
      CHECK(std::abs(m.tau(x + 2) - m.tau(x) - 1) < 1e-14);
      CHECK(std::abs(m.dtau(x + 2) - m.dtau(x)) < 1e-15);
    }
  }
  CHECK_THROWS_AS(MollifiedLift(keller_rugh(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MollifiedLift(keller_rugh(), -1.0), std::invalid_argument);
}

TEST_CASE("slope bounds and pairing") {
  for (double delta : {0.1, 0.01}) {
    MollifiedLift m(keller_rugh(), delta);
    double lo = 1, hi = 0;
    for (int i = 0; i < 20000; ++i) {
      double x = 2.0 * i / 20000;
      double d = m.dtau(x);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      CHECK(std::abs(d + m.dtau(x + 1) - 1) < 1e-14);
    }
    CHECK(lo >= 1.0 / 3.0 - 1e-15);
    CHECK(hi <= 2.0 / 3.0 + 1e-15);
  }
  // at delta = 0.1 the averaging is visible in double precision
  MollifiedLift m(keller_rugh(), 0.1);
  double lo = 1, hi = 0;
  for (int i = 0; i < 20000; ++i) {
    double d = m.dtau(2.0 * i / 20000);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK(lo > 1.0 / 3.0);
  CHECK(hi < 2.0 / 3.0);
}

TEST_CASE("small delta recovers the lift") {
  MollifiedLift m(keller_rugh(), 1e-5);
  for (double x : {0.05, 0.25, 0.4, 0.61, 1.3, 1.77}) CHECK(std::abs(m.dtau(x) - m.base_dtau(x)) < 1e-6);
  for (double delta : {1e-2, 1e-3}) {
    MollifiedLift md(keller_rugh(), delta);
    double worst = 0;
    for (int i = 0; i <= 4000; ++i) {
      double x = 2.0 * i / 4000;
      worst = std::max(worst, std::abs(md.tau(x) - md.base_tau(x)));
    }
    CHECK(worst <= delta);
  }
}

TEST_CASE("inverse") {
  for (double delta : {0.1, 0.01, 0.001}) {
    MollifiedLift m(keller_rugh(), delta);
    CHECK(m.tau_inv(0.0) == 0.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
      double y = u(rng);
      CHECK(std::abs(m.tau(m.tau_inv(y)) - y) < 1e-13);
    }
    CHECK(eval_tau_delta_inv(m, eval_tau_delta(m, 0.3)) == doctest::Approx(0.3).epsilon(1e-13));
  }
  MollifierOptions impossible;
  impossible.max_newton_iter = 1;
  impossible.newton_tol = 1e-300;
  MollifiedLift bad(keller_rugh(), 0.01, impossible);
  CHECK_THROWS_AS(bad.tau_inv(0.37), ConvergenceError);
}

TEST_CASE("inverse error scales with delta") {
  double prev = 0;
  for (double delta : {0.1, 0.01, 0.001}) {
    MollifiedLift m(keller_rugh(), delta);
    C0Estimate c0 = estimate_c0(m);
    CHECK(c0.inverse > 0);
    CHECK(c0.inverse < 1);
    CHECK(c0.derivative < 2);
    if (prev > 0) CHECK(c0.inverse * delta < prev);
    prev = c0.inverse * delta;
  }
}

TEST_CASE("mollified transfer operator") {
  MollifiedLift m(keller_rugh(), 0.01);
  auto one = [](double) { return 1.0; };
  for (int i = 0; i < 200; ++i) CHECK(std::abs(apply_P_delta(m, one, i / 200.0) - 1) < 1e-12);

  auto smooth = [](double x) { return 2 + std::cos(2 * M_PI * x) + 0.3 * std::sin(6 * M_PI * x); };
  MollifiedLift m1(keller_rugh(), 0.1);
  auto pf = [&](double x) { return apply_P_delta(m1, smooth, x); };
  double total = 0;
  for (int i = 0; i < 20; ++i)
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(pf, i / 20.0, (i + 1) / 20.0, 10, 1e-14);
  CHECK(std::abs(total - 2.0) < 1e-10);

  // away from the critical images P_delta f approaches P f
  MollifiedLift m4(keller_rugh(), 1e-4);
  Interpolant it = trig_interpolant([](double x) { return std::cos(2 * M_PI * x); }, 4 * M_PI * M_PI, 4096);
  JumpPLDouble exact(apply_P(keller_rugh(), it.f));
  JumpPLDouble view(it.f);
  auto fv = [&](double x) { return view(x); };
  for (double x : {0.08, 0.25, 0.41, 0.58, 0.75, 0.93})
    CHECK(std::abs(apply_P_delta(m4, fv, x) - exact(x)) < 1e-3);

  CHECK(apply_P_delta_n(m, one, 3, 0.2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("approximation bound") {
  PiecewiseLinearLift lift = keller_rugh();
  ApproxBound b1 = approx_bound_check(lift, 0.01, JumpPLFunction<Rational>::constant(Rational(1)));
  CHECK(b1.lhs <= 1e-10);
  CHECK(b1.holds());

  JumpPLFunction<QuadSurd> phi = phi_v2();
  std::vector<double> lhs;
  for (double delta : {0.1, 0.01, 0.001}) {
    ApproxBound b = approx_bound_check(lift, delta, phi);
    CHECK(b.holds());
    CHECK(b.c0_est == std::max(b.c0_inverse, b.c0_derivative));
    CHECK(b.rhs == doctest::Approx(2 * b.c0_est * delta * b.bv_norm));
    lhs.push_back(b.lhs);
  }
  CHECK(lhs[0] == doctest::Approx(0.457).epsilon(1e-2));
  CHECK(lhs[1] / lhs[0] == doctest::Approx(0.1).epsilon(0.15));
  CHECK(lhs[2] / lhs[1] == doctest::Approx(0.1).epsilon(0.15));

  // halving delta roughly halves the error
  for (double delta : {0.02, 0.01, 0.005}) {
    double a = approx_bound_check(lift, delta, phi).lhs;
    double h = approx_bound_check(lift, delta / 2, phi).lhs;
    CHECK(h / a >= 0.3);
    CHECK(h / a <= 0.7);
  }
  CHECK_THROWS_AS(approx_bound_check(lift, 1.0, phi), std::invalid_argument);
  CHECK_THROWS_AS(approx_bound_check(lift, 0.0, phi), std::invalid_argument);

  MollifiedLift m(lift, 0.01);
  ApproxBound shared = approx_bound_check(m, estimate_c0(m), phi);
  CHECK(shared.lhs == doctest::Approx(lhs[1]).epsilon(1e-12));
}

TEST_CASE("expansion of the mollified map") {
  MollifiedLift m(keller_rugh(), 0.1);
  DerivativeDelta d = derivative_inf_delta(m, 1);
  CHECK(d.inf_derivative > 1.5);
  CHECK(d.theta < 2.0 / 3.0);
  MollifiedLift m2(keller_rugh(), 0.01);
  CHECK(derivative_inf_delta(m2, 1).inf_derivative >= 1.5 - 1e-12);
  MollifiedLift m5(keller_rugh(), 1e-5);
  CHECK(derivative_inf_delta(m5, 1).theta == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  auto profile = theta_profile_delta(m, 4);
  REQUIRE(profile.size() == 4);
  CHECK(profile[0] == doctest::Approx(d.theta).epsilon(1e-12));
  for (double t : profile) CHECK(t < 1);
}

TEST_CASE("weights along mollified orbits stay below the exact ones") {
  PiecewiseLinearLift lift = keller_rugh();
  for (double delta : {0.1, 0.01}) {
    MollifiedLift m(lift, delta);
    for (int M : {1, 3, 6}) {
      double sup_delta = 1.0 / derivative_inf_delta(m, M).inf_derivative;
      double lhs = std::pow(2 * sup_delta, 1.0 / M);
      double rhs = std::pow(2.0, 1.0 / M) * std::pow(sup_gN(lift, M).get_d(), 1.0 / M);
      CHECK(lhs <= rhs * (1 + 1e-12));
    }
  }
}
