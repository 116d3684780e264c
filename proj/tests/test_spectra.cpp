#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pfc/dense_eigen.hpp"
#include "pfc/spectra.hpp"
#include "pfc/steptransfer.hpp"
#include "support/ulam_oracle.hpp"

using namespace pfc;

namespace {

double max_modulus_other_than_one(const std::vector<Complex>& values) {
  double m = 0;
  for (const auto& z : values)
    if (std::abs(z - 1.0) > 1e-8) m = std::max(m, std::abs(z));
  return m;
}

const SpectralOperator& op_small() {
  static const SpectralOperator op = assemble(MollifiedLift(keller_rugh(), 0.1), 65);
  return op;
}

}  // namespace

TEST_CASE("dense eigensolver") {
  ComplexMatrix a(2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 2;
  DenseEigenResult r = eig_dense(a);
  std::vector<double> re{r.values[0].real(), r.values[1].real()};
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(re[1] == doctest::Approx(3.0).epsilon(1e-14));

  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  ComplexMatrix b(50);
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t j = 0; j < 50; ++j) b(i, j) = Complex(g(rng), g(rng));
  DenseEigenResult rb = eig_dense(b);
  REQUIRE(rb.values.size() == 50);
  for (double res : rb.residuals) CHECK(res < 1e-12);

  ShiftInvertResult s = shift_invert(b, rb.values[7] + Complex(1e-6, 0));
  CHECK(s.converged);
  CHECK(std::abs(s.value - rb.values[7]) < 1e-10);
}

TEST_CASE("dense eigensolver on the step matrix") {
  SquareMatrix<Rational> m = transition_matrix(keller_rugh(), 6).entries;
  ComplexMatrix a(6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) a(i, j) = m(i, j).get_d();
  DenseEigenResult r = eig_dense(a, false);
  for (const auto& e : eigenvalues(m)) {
    double best = 1;
    for (const auto& z : r.values) best = std::min(best, std::abs(z - e.numeric));
    CHECK(best < 1e-7);  // the double root 0 splits at sqrt(eps)
  }
}

TEST_CASE("assembly") {
  const SpectralOperator& op = op_small();
  CHECK(op.N == 65);
  CHECK(op.K == 32);
  CHECK(op.index(0) == 32);
  CHECK(op.mode0_defect < 1e-12);
  CHECK(op.conjugate_defect < 1e-12);
  CHECK(op.assembly_residual < 1e-10);
  CHECK(std::abs(op.A(op.index(0), op.index(0)) - 1.0) < 1e-12);
  CHECK_THROWS_AS(assemble(MollifiedLift(keller_rugh(), 0.1), 64), std::invalid_argument);
  CHECK_THROWS_AS(assemble(MollifiedLift(keller_rugh(), 0.1), 31), std::invalid_argument);
  CHECK(refine(513) == 1025);
}

TEST_CASE("doubling map") {
  MollifiedLift m(doubling_map(), 0.05);
  SpectralOperator op = assemble(m, 65);
  // P e_n = e_{n/2} for even n and 0 otherwise
  for (long n = -4; n <= 4; ++n) {
    for (long k = -32; k <= 32; ++k) {
      Complex expected = (n % 2 == 0 && k == n / 2) ? 1.0 : 0.0;
      CHECK(std::abs(op.A(op.index(k), op.index(n)) - expected) < 1e-12);
    }
  }
  // 0 is defective with Jordan chains of length up to log2(K) + 1, so
  // rounding spreads it by roughly eps^(1/6)
  DenseEigenResult r = eig_dense(op.A, false);
  CHECK(max_modulus_other_than_one(r.values) < 1e-2);
  CHECK(ess_radius_bound(m, 4) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("identification") {
  std::vector<Complex> v{1.0, Complex(-0.7, 0), Complex(0.5, 0.1)};
  CHECK(identify_lambda(v) == 1);
  std::vector<Complex> pair{1.0, Complex(-0.76, 0.1), Complex(-0.76, -0.1)};
  CHECK_THROWS_AS(identify_lambda(pair), IdentificationError);
  std::vector<Complex> only_one{1.0};
  CHECK_THROWS_AS(identify_lambda(only_one), IdentificationError);
}

TEST_CASE("eigenfunctions") {
  const SpectralOperator& op = op_small();
  Eigenfunction e1 = eigenfunction(op, 1.0);
  CHECK(std::abs(e1.value - 1.0) < 1e-12);
  for (long k = -op.K; k <= op.K; ++k) {
    Complex expected = k == 0 ? 1.0 : 0.0;
    CHECK(std::abs(e1.coefficients[op.index(k)] - expected) < 1e-10);
  }
  DenseEigenResult r = eig_dense(op.A, false);
  Complex lam = r.values[identify_lambda(r.values)];
  Eigenfunction e2 = eigenfunction(op, lam);
  CHECK(std::abs(e2.value - lam) < 1e-10);
  CHECK(e2.residual < 1e-10);
  CHECK(e2.coefficients[op.index(1)].real() >= 0);
  for (long k = 1; k <= op.K; ++k)
    CHECK(std::abs(e2.coefficients[op.index(-k)] - std::conj(e2.coefficients[op.index(k)])) < 1e-12);
  for (double x : {0.1, 0.37, 0.8}) CHECK(std::abs(evaluate_modes(e2.coefficients, x).imag()) < 1e-12);
}

TEST_CASE("decay fit") {
  const double rho = 0.05;
  std::vector<Complex> c(41);
  for (long n = -20; n <= 20; ++n) c[static_cast<std::size_t>(n + 20)] = std::exp(-2 * M_PI * rho * std::abs(n)) * 3.0;
  DecayFit fit = decay_rate(c);
  CHECK(fit.rho_hat == doctest::Approx(rho).epsilon(1e-10));
  CHECK(fit.fit_r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.modes == 20);
  std::vector<Complex> tiny(41, Complex(0, 0));
  tiny[20] = 1;
  tiny[21] = tiny[19] = 0.1;
  CHECK_THROWS_AS(decay_rate(tiny), std::invalid_argument);
}

TEST_CASE("mode dump round trip") {
  std::vector<Complex> c{Complex(1, 2), Complex(-0.5, 1e-300), Complex(3.25, -7)};
  std::stringstream ss;
  write_mode_dump(ss, 0.01, Complex(-0.69, 0), c);
  double delta = 0;
  Complex target;
  std::vector<Complex> back = read_mode_dump(ss, &delta, &target);
  CHECK(back == c);
  CHECK(delta == 0.01);
  CHECK(target == Complex(-0.69, 0));
  std::string bytes = ss.str();
  CHECK(bytes.substr(0, 8) == "PFCMODES");
  CHECK(bytes.size() == 8 + 4 + 4 + 24 + 16 * c.size());
  std::stringstream junk("NOTMODES........");
  CHECK_THROWS(read_mode_dump(junk));
  std::stringstream cut(bytes.substr(0, 30));
  CHECK_THROWS(read_mode_dump(cut));
}

TEST_CASE("leading spectrum at delta = 0.01") {
  MollifiedLift m(keller_rugh(), 0.01);
  SpectrumReport r = leading_spectrum(m, 513);
  REQUIRE_FALSE(r.eigenvalues.empty());
  CHECK(std::abs(r.eigenvalues[0].value - 1.0) < 1e-12);
  CHECK(r.lambda_delta.real() == doctest::Approx(-0.69059081402206).epsilon(1e-9));
  CHECK(std::abs(r.lambda_delta.imag()) < 1e-10);
  CHECK(r.converged);
  CHECK(r.outside_07 == 1);
  CHECK(r.ess_radius_bound == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(r.gap == doctest::Approx(std::abs(r.lambda_delta - lambda2().to_complex())));
  REQUIRE(r.decay);
  CHECK(r.decay->rho_hat > 0);
  nlohmann::json j = spectrum_report_json(r);
  CHECK(j["schema"] == "1");
  CHECK(j.contains("lambda_delta"));

  // an independent discretization of the same operator
  testing::UlamMatrix ulam(m, 4096);
  for (std::size_t i = 0; i < 4096; i += 512) CHECK(ulam.column_sum(i) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(ulam.subdominant_eigenvalue() - r.lambda_delta.real()) < 1e-3);
}

TEST_CASE("sweep") {
  SweepOptions opt;
  opt.N0 = 129;
  opt.n_cap = 1025;
  auto rows = delta_sweep(keller_rugh(), {0.1}, opt);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].converged);
  CHECK(rows[0].refine_diff < 1e-8);
  CHECK(rows[0].N_used <= 1025);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  CHECK(os.str().rfind("delta,re_lambda,im_lambda,abs_lambda,gap,ess_bound,N_used,converged,outside_0.7\n", 0) == 0);
  CHECK_THROWS_AS(delta_sweep(keller_rugh(), {0.01, 0.1}, opt), std::invalid_argument);
  CHECK_THROWS_AS(delta_sweep(keller_rugh(), {0.0}, opt), std::invalid_argument);
  auto d = default_deltas();
  REQUIRE(d.size() == 5);
  CHECK(d.front() == doctest::Approx(0.1));
  CHECK(d.back() == doctest::Approx(0.001));
}
