#include "ulam_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pfc::testing {

UlamMatrix::UlamMatrix(const MollifiedLift& m, std::size_t cells) : n_(cells) {
  const double h = 1.0 / static_cast<double>(n_);
  auto cell_of = [&](double y) {
    auto k = static_cast<long>(std::floor(y / h));
    return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(n_) - 1));
  };
  for (std::size_t j = 0; j < n_; ++j) {
    for (long branch = 0; branch < m.period(); ++branch) {
      // the preimage of cell j on this branch is [a, b]
      double a = std::clamp(m.tau(static_cast<double>(j) * h + static_cast<double>(branch)), 0.0, 1.0);
      double b = std::clamp(m.tau(static_cast<double>(j + 1) * h + static_cast<double>(branch)), 0.0, 1.0);
      for (std::size_t i = cell_of(a); i <= cell_of(std::nextafter(b, 0.0)); ++i) {
        double lo = std::max(a, static_cast<double>(i) * h);
        double hi = std::min(b, static_cast<double>(i + 1) * h);
        if (hi > lo) entries_.push_back({j, i, (hi - lo) / h});
      }
    }
  }
}

std::vector<double> UlamMatrix::apply(const std::vector<double>& v) const {
  std::vector<double> out(n_, 0.0);
  for (const auto& e : entries_) out[e.row] += e.weight * v[e.col];
  return out;
}

double UlamMatrix::column_sum(std::size_t i) const {
  double s = 0;
  for (const auto& e : entries_)
    if (e.col == i) s += e.weight;
  return s;
}

double UlamMatrix::subdominant_eigenvalue(int max_iter, double tol) const {
  std::mt19937_64 rng(13);
  std::vector<double> v(n_);
  for (auto& x : v) x = static_cast<double>(rng() % 1000001) / 1000000.0 - 0.5;
  auto deflate = [&](std::vector<double>& x) {
    double mean = 0;
    for (double y : x) mean += y;
    mean /= static_cast<double>(n_);
    for (auto& y : x) y -= mean;
  };

  double estimate = 0;
  int stable = 0;
  for (int it = 0; it < max_iter; ++it) {
    // rounding reintroduces the eigenvalue-1 direction, so project it out each step
    deflate(v);
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    std::vector<double> w = apply(v);
    double rq = 0;
    for (std::size_t i = 0; i < n_; ++i) rq += v[i] * w[i];
    stable = std::abs(rq - estimate) < tol ? stable + 1 : 0;
    estimate = rq;
    if (stable >= 20) break;
    v = std::move(w);
  }
  return estimate;
}

}  // namespace pfc::testing
