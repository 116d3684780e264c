#ifndef PFC_STEPTRANSFER_HPP
#define PFC_STEPTRANSFER_HPP

#include <complex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pfc/circlemap.hpp"
#include "pfc/jump_function.hpp"
#include "pfc/rational.hpp"
#include "pfc/surd.hpp"

namespace pfc {

class NonMarkovError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, T(0)) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) { return a.n_ == b.n_ && a.data_ == b.data_; }

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

/// Transfer operator on the step space of the grid I_k = ((k-1)/q, k/q):
/// P(sum_i c_i 1_{I_i}) = sum_j (cM)_j 1_{I_j}.
struct TransitionMatrix {
  long q = 0;
  SquareMatrix<Rational> entries;
};

/// Polynomial over Q with coefficients in ascending degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> ascending);

  std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  const Rational& coefficient(std::size_t k) const { return coeffs_[k]; }
  bool monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }

  template <class S>
  S evaluate(const S& x) const {
    S acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + S(*it);
    return acc;
  }
  std::complex<double> evaluate(std::complex<double> x) const;

  Polynomial derivative() const;
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  /// "x^2+1/3*x-1/3"
  std::string to_string(const std::string& var = "x") const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

using CharPoly = Polynomial;

struct PolyFactor {
  Polynomial factor;  // monic
  int multiplicity = 1;
};

/// Factors a monic rational polynomial into its rational linear factors
/// and a remaining part (irreducible quadratic, or higher-degree cofactor).
std::vector<PolyFactor> factor_rational(const Polynomial& p);
std::string factorization_string(const std::vector<PolyFactor>& factors, const std::string& var = "x");

struct Eigenvalue {
  std::optional<QuadSurd> exact;  // set for roots of linear/quadratic factors
  std::complex<double> numeric;
  int multiplicity = 1;
  double residual = 0;  // |charpoly(numeric)|
  std::string exact_string() const { return exact ? exact->to_string() : std::string(); }
};

template <class S>
struct StepFunction {
  std::vector<S> values;  // value on I_k; 0 on the grid points

  long q() const { return static_cast<long>(values.size()); }
  JumpPLFunction<S> embed() const { return JumpPLFunction<S>::step(values); }

  /// Grid points k/q where the left and right values differ.
  std::vector<Rational> essential_discontinuities() const {
    std::vector<Rational> out;
    const std::size_t n = values.size();
    for (std::size_t k = 0; k < n; ++k)
      if (values[(k + n - 1) % n] != values[k]) out.push_back(make_rational(static_cast<long>(k), q()));
    return out;
  }
};

TransitionMatrix transition_matrix(const PiecewiseLinearLift& lift, long q);

/// Exact det(lambda I - M) by the Faddeev-LeVerrier recursion.
CharPoly char_poly(const SquareMatrix<Rational>& m);

/// Roots of the characteristic polynomial with multiplicities, sorted by
/// decreasing modulus. Linear and quadratic factors give exact values in
/// Q(sqrt(d)); higher factors fall back to companion-matrix numerics.
std::vector<Eigenvalue> eigenvalues(const SquareMatrix<Rational>& m);

/// Left eigenvector v M = lambda v over Q(sqrt(d)), normalized so that its
/// first nonzero entry is 1. Throws std::invalid_argument if lambda is not
/// an eigenvalue or is not simple.
std::vector<QuadSurd> left_eigenvector(const SquareMatrix<Rational>& m, const QuadSurd& lambda);

/// c M, the step-space action of the transfer operator.
template <class S>
std::vector<S> apply_P_step(const SquareMatrix<Rational>& m, std::span<const S> c) {
  if (c.size() != m.size()) throw std::invalid_argument("apply_P_step: dimension mismatch");
  std::vector<S> out(c.size(), S(0));
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == S(0)) continue;
    for (std::size_t j = 0; j < c.size(); ++j)
      if (m(i, j) != 0) out[j] += c[i] * S(m(i, j));
  }
  return out;
}

template <class S>
StepFunction<S> step_eigenfunction(std::span<const S> v, long q) {
  if (static_cast<long>(v.size()) != q) throw std::invalid_argument("step_eigenfunction: length(v) != q");
  return StepFunction<S>{std::vector<S>(v.begin(), v.end())};
}

/// (-(1 + sqrt 13)/6), the subdominant eigenvalue of the piecewise-linear example.
QuadSurd lambda2();

void write_matrix_csv(std::ostream& os, const SquareMatrix<Rational>& m);
nlohmann::json spectrum_json(const std::vector<Eigenvalue>& eigs);

}  // namespace pfc

#endif  // PFC_STEPTRANSFER_HPP
