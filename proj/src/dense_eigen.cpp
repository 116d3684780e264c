#include "pfc/dense_eigen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace pfc {

std::vector<Complex> ComplexMatrix::apply(const std::vector<Complex>& v) const {
  std::vector<Complex> out(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const Complex vj = v[j];
    const Complex* col = column(j);
    for (std::size_t i = 0; i < n_; ++i) out[i] += col[i] * vj;
  }
  return out;
}

namespace {

double norm2(const std::vector<Complex>& v) {
  double s = 0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

DenseEigenResult eig_dense(const ComplexMatrix& a, bool want_vectors) {
  const auto n = static_cast<lapack_int>(a.size());
  DenseEigenResult out;
  if (n == 0) return out;
  std::vector<Complex> work(a.data(), a.data() + a.size() * a.size());
  std::vector<Complex> w(static_cast<std::size_t>(n));
  std::vector<Complex> vr(want_vectors ? a.size() * a.size() : 1);
  Complex vl_dummy;
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, work.data(), n, w.data(),
                                  &vl_dummy, 1, vr.data(), want_vectors ? n : 1);
  if (info != 0) throw std::runtime_error("zgeev failed to converge (info=" + std::to_string(info) + ")");
  out.values = std::move(w);
  if (!want_vectors) return out;

  for (std::size_t k = 0; k < a.size(); ++k) {
    std::vector<Complex> v(vr.begin() + static_cast<std::ptrdiff_t>(k * a.size()),
                           vr.begin() + static_cast<std::ptrdiff_t>((k + 1) * a.size()));
    double nv = norm2(v);
    for (auto& z : v) z /= nv;
    std::vector<Complex> av = a.apply(v);
    for (std::size_t i = 0; i < v.size(); ++i) av[i] -= out.values[k] * v[i];
    out.residuals.push_back(norm2(av));
    out.vectors.push_back(std::move(v));
  }
  return out;
}

ShiftInvertResult shift_invert(const ComplexMatrix& a, Complex shift, double tol, int max_iter) {
  const std::size_t n = a.size();
  ComplexMatrix lu = a;
  for (std::size_t i = 0; i < n; ++i) lu(i, i) -= shift;
  std::vector<lapack_int> piv(n);
  const auto ln = static_cast<lapack_int>(n);
  lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, ln, ln, lu.data(), ln, piv.data());
  if (info < 0) throw std::runtime_error("zgetrf: bad argument");

  ShiftInvertResult out;
  if (info > 0) {
    // shift is an eigenvalue to working precision
    out.value = shift;
    out.converged = true;
    return out;
  }

  std::vector<Complex> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = Complex(1.0 / (1.0 + static_cast<double>(i)), 0.5 / (2.0 + static_cast<double>(i)));
  double nv = norm2(v);
  for (auto& z : v) z /= nv;

  Complex previous = shift;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<Complex> w = v;
    info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', ln, 1, lu.data(), ln, piv.data(), w.data(), ln);
    if (info != 0) throw std::runtime_error("zgetrs failed");
    // (A - s)^{-1} v = mu v  =>  lambda = s + 1/mu
    Complex mu = std::inner_product(v.begin(), v.end(), w.begin(), Complex(0),
                                    std::plus<>(), [](const Complex& x, const Complex& y) { return std::conj(x) * y; });
    double nw = norm2(w);
    Complex lambda = shift + 1.0 / mu;
    // residual of the normalized iterate: (A - lambda) w/|w| = v/|w| - (lambda - s) w/|w|
    double res = 0;
    for (std::size_t i = 0; i < n; ++i) res += std::norm(v[i] / nw - (lambda - shift) * w[i] / nw);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    out.value = lambda;
    out.residual = std::sqrt(res);
    out.iterations = it;
    if (std::abs(lambda - previous) <= tol * std::max(1.0, std::abs(lambda)) && it > 1) {
      out.converged = true;
      break;
    }
    previous = lambda;
  }
  out.vector = std::move(v);
  return out;
}

}  // namespace pfc
