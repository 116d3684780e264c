#ifndef PFC_DENSE_EIGEN_HPP
#define PFC_DENSE_EIGEN_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace pfc {

using Complex = std::complex<double>;

/// Dense column-major complex matrix, the layout LAPACK expects.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t size() const { return n_; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[j * n_ + i]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[j * n_ + i]; }
  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }
  Complex* column(std::size_t j) { return data_.data() + j * n_; }
  const Complex* column(std::size_t j) const { return data_.data() + j * n_; }

  std::vector<Complex> apply(const std::vector<Complex>& v) const;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

struct DenseEigenResult {
  std::vector<Complex> values;
  /// Right eigenvectors (unit 2-norm), empty unless requested.
  std::vector<std::vector<Complex>> vectors;
  /// ||A v - lambda v|| / ||v|| per pair, empty unless vectors requested.
  std::vector<double> residuals;
};

/// Full spectrum of a general complex matrix (LAPACK zgeev: balancing,
/// Hessenberg reduction, shifted QR). Throws std::runtime_error when the
/// QR iteration fails to converge.
DenseEigenResult eig_dense(const ComplexMatrix& a, bool want_vectors = true);

/// Eigenpair nearest a shift by inverse iteration on an LU factorization
/// of (A - shift I). Used to refine one eigenvalue on large matrices
/// without a full eigensolve.
struct ShiftInvertResult {
  Complex value;
  std::vector<Complex> vector;  // unit 2-norm
  double residual = 0;          // ||A v - value v||
  int iterations = 0;
  bool converged = false;
};
ShiftInvertResult shift_invert(const ComplexMatrix& a, Complex shift, double tol = 1e-14, int max_iter = 200);

}  // namespace pfc

#endif  // PFC_DENSE_EIGEN_HPP
