#include "pfc/steptransfer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfc/dense_eigen.hpp"

namespace pfc {

Polynomial::Polynomial(std::vector<Rational> ascending) : coeffs_(std::move(ascending)) { trim(); }

void Polynomial::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0) coeffs_.pop_back();
}

std::complex<double> Polynomial::evaluate(std::complex<double> x) const {
  std::complex<double> acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->get_d();
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial({Rational(0)});
  std::vector<Rational> d;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d.emplace_back(coeffs_[k] * static_cast<long>(k));
  return Polynomial(std::move(d));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(out));
}

std::string Polynomial::to_string(const std::string& var) const {
  std::string out;
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    const Rational& c = coeffs_[k];
    if (c == 0 && !(k == 0 && out.empty())) continue;
    Rational mag = abs(c);
    std::string term;
    if (k == 0 || mag != 1) term = pfc::to_string(mag);
    if (k > 0) {
      if (!term.empty()) term += "*";
      term += var;
      if (k > 1) term += "^" + std::to_string(k);
    }
    if (out.empty()) {
      out = (c < 0 ? "-" : "") + term;
    } else {
      out += (c < 0 ? "-" : "+") + term;
    }
  }
  return out;
}

namespace {

std::vector<Integer> divisors(Integer n) {
  n = abs(n);
  std::vector<Integer> small, large;
  for (Integer d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d * d != n) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

// p / (x - r), assuming p(r) = 0.
Polynomial deflate(const Polynomial& p, const Rational& r) {
  const auto& c = p.coefficients();
  std::vector<Rational> q(c.size() - 1);
  Rational carry(0);
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    carry = c[k + 1] + carry * r;
    q[k] = carry;
  }
  return Polynomial(std::move(q));
}

const Integer kMaxFactorable("1000000000000");

}  // namespace

std::vector<PolyFactor> factor_rational(const Polynomial& p) {
  if (!p.monic()) throw std::invalid_argument("factor_rational expects a monic polynomial");
  std::vector<PolyFactor> out;
  Polynomial rest = p;

  int zeros = 0;
  while (rest.degree() > 0 && rest.coefficient(0) == 0) {
    std::vector<Rational> c(rest.coefficients().begin() + 1, rest.coefficients().end());
    rest = Polynomial(std::move(c));
    ++zeros;
  }
  if (zeros > 0) out.push_back({Polynomial({Rational(0), Rational(1)}), zeros});

  // candidate roots p/q with p dividing the constant and q the leading coefficient
  if (rest.degree() > 0) {
    Integer scale = 1;
    for (const auto& c : rest.coefficients()) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), c.get_den_mpz_t());
    Integer lead = Rational(rest.coefficients().back() * scale).get_num();
    Integer constant = Rational(rest.coefficient(0) * scale).get_num();
    if (abs(lead) <= kMaxFactorable && abs(constant) <= kMaxFactorable) {
      std::vector<Rational> candidates;
      for (const auto& a : divisors(constant))
        for (const auto& b : divisors(lead)) {
          candidates.push_back(make_rational(a, b));
          candidates.push_back(make_rational(Integer(-a), b));
        }
      std::sort(candidates.begin(), candidates.end(), std::greater<>());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      for (const auto& r : candidates) {
        int mult = 0;
        while (rest.degree() > 0 && rest.evaluate(r) == 0) {
          rest = deflate(rest, r);
          ++mult;
        }
        if (mult > 0) out.push_back({Polynomial({Rational(-r), Rational(1)}), mult});
      }
    }
  }
  if (rest.degree() > 0) out.push_back({rest, 1});
  return out;
}

std::string factorization_string(const std::vector<PolyFactor>& factors, const std::string& var) {
  std::string out;
  for (const auto& f : factors) {
    if (!out.empty()) out += "*";
    bool bare = f.factor.degree() == 1 && f.factor.coefficient(0) == 0;
    std::string body = bare ? var : "(" + f.factor.to_string(var) + ")";
    out += body;
    if (f.multiplicity > 1) out += "^" + std::to_string(f.multiplicity);
  }
  return out.empty() ? "1" : out;
}

TransitionMatrix transition_matrix(const PiecewiseLinearLift& lift, long q) {
  if (!is_markov_on_grid(lift, q)) throw NonMarkovError("map is not Markov on the grid 1/" + std::to_string(q));
  TransitionMatrix tm;
  tm.q = q;
  tm.entries = SquareMatrix<Rational>(static_cast<std::size_t>(q));
  for (long j = 0; j < q; ++j) {
    Rational mid = make_rational(2 * j + 1, 2 * q);
    for (long branch = 0; branch < lift.period(); ++branch) {
      Rational y = mid + branch;
      Rational z = lift.tau(y);
      long i = floor_integer(Rational(z * q)).get_si();
      tm.entries(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) += lift.slope_at(y);
    }
  }
  return tm;
}

CharPoly char_poly(const SquareMatrix<Rational>& m) {
  const std::size_t n = m.size();
  std::vector<Rational> c(n + 1, Rational(0));
  c[n] = 1;
  // M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k
  SquareMatrix<Rational> mk(n);
  for (std::size_t k = 1; k <= n; ++k) {
    SquareMatrix<Rational> next(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Rational s(0);
        for (std::size_t l = 0; l < n; ++l)
          if (m(i, l) != 0) s += m(i, l) * mk(l, j);
        next(i, j) = s;
      }
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = std::move(next);
    Rational trace(0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) trace += m(i, l) * mk(l, i);
    c[n - k] = -trace / static_cast<long>(k);
  }
  return Polynomial(std::move(c));
}

namespace {

std::vector<std::complex<double>> numeric_roots(const Polynomial& p) {
  const std::size_t d = p.degree();
  ComplexMatrix companion(d);
  for (std::size_t i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < d; ++i) companion(i, d - 1) = -p.coefficient(i).get_d();
  return eig_dense(companion, false).values;
}

}  // namespace

std::vector<Eigenvalue> eigenvalues(const SquareMatrix<Rational>& m) {
  CharPoly cp = char_poly(m);
  std::vector<Eigenvalue> out;
  for (const auto& f : factor_rational(cp)) {
    const Polynomial& poly = f.factor;
    if (poly.degree() == 1) {
      Eigenvalue e;
      e.exact = QuadSurd(Rational(-poly.coefficient(0)));
      e.numeric = e.exact->to_complex();
      e.multiplicity = f.multiplicity;
      out.push_back(std::move(e));
      continue;
    }
    if (poly.degree() == 2) {
      const Rational& b = poly.coefficient(1);
      const Rational& c = poly.coefficient(0);
      Rational disc = b * b - 4 * c;
      Integer radicand = disc.get_num() * disc.get_den();
      if (abs(radicand) <= kMaxFactorable) {
        for (int s : {-1, 1}) {
          Eigenvalue e;
          e.exact = QuadSurd(Rational(-b / 2), Rational(make_rational(s, 2) / disc.get_den()), radicand.get_si());
          e.numeric = e.exact->to_complex();
          e.multiplicity = f.multiplicity;
          out.push_back(std::move(e));
        }
        continue;
      }
    }
    for (const auto& z : numeric_roots(poly)) {
      Eigenvalue e;
      e.numeric = z;
      e.multiplicity = f.multiplicity;
      out.push_back(std::move(e));
    }
  }
  for (auto& e : out) e.residual = std::abs(cp.evaluate(e.numeric));
  std::stable_sort(out.begin(), out.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    double ma = std::abs(a.numeric), mb = std::abs(b.numeric);
    if (std::abs(ma - mb) > 1e-12) return ma > mb;
    if (a.numeric.real() != b.numeric.real()) return a.numeric.real() > b.numeric.real();
    return a.numeric.imag() > b.numeric.imag();
  });
  return out;
}

std::vector<QuadSurd> left_eigenvector(const SquareMatrix<Rational>& m, const QuadSurd& lambda) {
  CharPoly cp = char_poly(m);
  if (cp.evaluate(lambda) != QuadSurd(0)) throw std::invalid_argument(lambda.to_string() + " is not an eigenvalue");
  if (cp.derivative().evaluate(lambda) == QuadSurd(0))
    throw std::invalid_argument(lambda.to_string() + " is not a simple eigenvalue");

  // (M^T - lambda I) v = 0 by Gauss-Jordan elimination over Q(sqrt d).
  const std::size_t n = m.size();
  std::vector<std::vector<QuadSurd>> a(n, std::vector<QuadSurd>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = QuadSurd(m(j, i)) - (i == j ? lambda : QuadSurd(0));

  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < n; ++col) {
    std::size_t pr = row;
    while (pr < n && a[pr][col] == QuadSurd(0)) ++pr;
    if (pr == n) continue;
    std::swap(a[pr], a[row]);
    QuadSurd inv = QuadSurd(1) / a[row][col];
    for (auto& x : a[row]) x *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row || a[r][col] == QuadSurd(0)) continue;
      QuadSurd factor = a[r][col];
      for (std::size_t c = 0; c < n; ++c) a[r][c] -= factor * a[row][c];
    }
    pivot_col.push_back(col);
    ++row;
  }
  if (pivot_col.size() != n - 1) throw std::invalid_argument("eigenspace is not one-dimensional");

  std::size_t free_col = 0;
  while (std::find(pivot_col.begin(), pivot_col.end(), free_col) != pivot_col.end()) ++free_col;
  std::vector<QuadSurd> v(n, QuadSurd(0));
  v[free_col] = QuadSurd(1);
  for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -a[r][free_col];

  auto first = std::find_if(v.begin(), v.end(), [](const QuadSurd& x) { return x != QuadSurd(0); });
  QuadSurd scale = QuadSurd(1) / *first;
  for (auto& x : v) x *= scale;
  return v;
}

QuadSurd lambda2() { return QuadSurd(make_rational(-1, 6), make_rational(-1, 6), 13); }

void write_matrix_csv(std::ostream& os, const SquareMatrix<Rational>& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j > 0) os << ',';
      os << to_fraction_string(m(i, j));
    }
    os << '\n';
  }
}

nlohmann::json spectrum_json(const std::vector<Eigenvalue>& eigs) {
  nlohmann::json j;
  j["schema"] = "1";
  j["eigenvalues"] = nlohmann::json::array();
  for (const auto& e : eigs) {
    nlohmann::json entry{{"re", e.numeric.real()}, {"im", e.numeric.imag()}, {"mult", e.multiplicity}};
    if (e.exact) entry["exact"] = e.exact->to_string();
    j["eigenvalues"].push_back(std::move(entry));
  }
  return j;
}

}  // namespace pfc
