#include "pfc/bvlab.hpp"

#include <algorithm>
#include <cmath>

#include "pfc/steptransfer.hpp"

namespace pfc {

JumpPLFunction<Rational> weight_pullback(const PiecewiseLinearLift& lift, int N) {
  using F = JumpPLFunction<Rational>;
  std::vector<F::Knot> knots;
  for_each_cylinder(lift, N, [&](const Rational& lo, const Rational&, const Rational& w) {
    knots.push_back(F::Knot{lo, Rational(0), w, w});
  });
  return F(std::move(knots));
}

Rational sup_gN(const PiecewiseLinearLift& lift, int N) {
  Rational sup(0);
  for_each_cylinder(lift, N, [&](const Rational&, const Rational&, const Rational& w) {
    if (w > sup) sup = w;
  });
  return sup;
}

Rational var_gN(const PiecewiseLinearLift& lift, int N) {
  Rational total(0);
  for_each_cylinder(lift, N, [&](const Rational&, const Rational&, const Rational& w) { total += w; });
  return 2 * total;
}

GreedyPartition greedy_partition(const PiecewiseLinearLift& lift, int N, const Rational& cap) {
  GreedyPartition out;
  bool first = true;
  Rational first_weight, first_mid;
  Rational prev_weight, prev_mid;
  Rational start, variation;

  auto close_atom = [&](const Rational& end) {
    Rational ratio = variation / (end - start);
    if (out.atoms == 0 || ratio > out.D) out.D = ratio;
    if (out.atoms == 0 || variation > out.max_variation) out.max_variation = variation;
    ++out.atoms;
  };
  // The dip at a cylinder endpoint contributes both neighbouring plateaus.
  auto cross_endpoint = [&](const Rational& w_next, const Rational& mid_next) {
    Rational c = prev_weight + w_next;
    if (c > cap) throw std::invalid_argument("variation cap below a single dip of g_N");
    if (variation + c > cap) {
      close_atom(prev_mid);
      start = prev_mid;
      variation = c;
    } else {
      variation += c;
    }
    prev_weight = w_next;
    prev_mid = mid_next;
  };

  for_each_cylinder(lift, N, [&](const Rational& lo, const Rational& hi, const Rational& w) {
    Rational mid = (lo + hi) / 2;
    if (first) {
      first = false;
      first_weight = w;
      first_mid = mid;
      prev_weight = w;
      prev_mid = mid;
      start = mid;
      variation = 0;
      return;
    }
    cross_endpoint(w, mid);
  });
  // wrap through the endpoint at 0 = 1 back to the first midpoint
  cross_endpoint(first_weight, Rational(first_mid + 1));
  close_atom(prev_mid);
  return out;
}

LYConstants ly_constants(const PiecewiseLinearLift& lift, const Rational& kappa, int max_M) {
  if (kappa <= 0 || kappa >= 1) throw KappaError("kappa must lie in (0, 1)");
  LYConstants c;
  c.kappa = kappa;
  c.lambda = 3;

  // kappa > theta iff kappa^N > ||g_N|| for some N, theta being the infimum
  // of ||g_N||^{1/N}.
  bool admissible = false;
  c.theta_upper = 1;
  Rational kn(1);
  for (int N = 1; N <= 10; ++N) {
    Rational s = sup_gN(lift, N);
    kn *= kappa;
    if (kn > s) admissible = true;
    c.theta_upper = std::min(c.theta_upper, std::pow(s.get_d(), 1.0 / N));
  }
  if (!admissible)
    throw KappaError("kappa = " + to_string(kappa) + " does not exceed theta (upper estimate " +
                     std::to_string(c.theta_upper) + ")");

  kn = 1;
  for (int N = 1;; ++N) {
    if (N > max_M) throw KappaError("no M <= " + std::to_string(max_M) + " with 2 ||g_M|| < kappa^M");
    Rational s = sup_gN(lift, N);
    c.sup_g.push_back(s);
    kn *= kappa;
    if (2 * s < kn) {
      c.M = N;
      break;
    }
  }

  c.D = 0;
  for (int N = 1; N <= c.M; ++N) {
    Rational cap = c.lambda - c.sup_g[static_cast<std::size_t>(N - 1)];
    GreedyPartition part = greedy_partition(lift, N, cap);
    c.D_list.push_back(part.D);
    c.atoms.push_back(part.atoms);
    if (part.D > c.D) c.D = part.D;
  }
  Rational kM = pow(kappa, static_cast<unsigned>(c.M));
  Rational a = c.D / (1 - kM);
  Rational b = c.lambda / pow(kappa, static_cast<unsigned>(c.M - 1));
  c.F = a > b ? a : b;
  return c;
}

nlohmann::json ly_constants_json(const LYConstants& c) {
  nlohmann::json j;
  j["kappa"] = to_string(c.kappa);
  j["M"] = c.M;
  j["lambda"] = to_string(c.lambda);
  j["D"] = to_string(c.D);
  j["D_float"] = c.D.get_d();
  j["F"] = to_string(c.F);
  j["F_float"] = c.F.get_d();
  j["theta_upper"] = c.theta_upper;
  j["D_N"] = nlohmann::json::array();
  for (std::size_t i = 0; i < c.D_list.size(); ++i) {
    j["D_N"].push_back({{"N", i + 1},
                        {"sup_g", to_string(c.sup_g[i])},
                        {"D", to_string(c.D_list[i])},
                        {"D_float", c.D_list[i].get_d()},
                        {"atoms", c.atoms[i]}});
  }
  return j;
}

nlohmann::json ly_check_json(const LYCheck& c) {
  return {{"n", c.n}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"exact", c.exact}};
}

namespace {

double grid_variation(const MollifiedLift& m, const std::function<double(double)>& f, int n, long points) {
  std::vector<double> h(static_cast<std::size_t>(points));
  for (long i = 0; i < points; ++i)
    h[static_cast<std::size_t>(i)] = apply_P_delta_n(m, f, n, static_cast<double>(i) / static_cast<double>(points));
  double var = 0;
  for (std::size_t i = 0; i < h.size(); ++i) var += std::abs(h[(i + 1) % h.size()] - h[i]);
  return var;
}

}  // namespace

LYCheck check_ly_delta(const MollifiedLift& m, const JumpPLFunction<Rational>& f, int n, const LYConstants& c,
                       int grid_log2) {
  if (n < 1) throw std::invalid_argument("check_ly needs n >= 1");
  JumpPLDouble view(f);
  auto fd = [&](double x) { return view(x); };
  double rhs = c.F.get_d() * (std::pow(c.kappa.get_d(), n) * f.variation().get_d() + f.l1_norm().get_d());
  long points = 1L << grid_log2;
  double lhs = grid_variation(m, fd, n, points);
  if (lhs > rhs) lhs = grid_variation(m, fd, n, 4 * points);
  LYCheck r;
  r.n = n;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.exact = false;
  r.holds = lhs <= rhs;
  return r;
}

CylinderSum cylinder_sum_check(const PiecewiseLinearLift& lift, const JumpPLFunction<Rational>& f, int n,
                               const LYConstants& c) {
  CylinderSum out;
  out.n = n;
  out.lhs = 0;
  for_each_cylinder(lift, n, [&](const Rational& lo, const Rational& hi, const Rational&) {
    out.lhs += apply_P_n(lift, f.restricted(lo, hi), n).variation();
    ++out.cylinders;
  });
  out.rhs = c.F * (pow(c.kappa, static_cast<unsigned>(n)) * f.variation() + f.l1_norm());
  return out;
}

JumpPLFunction<Rational> random_jump_function(std::mt19937_64& rng, int max_knots) {
  using F = JumpPLFunction<Rational>;
  auto uniform = [&](long k) { return static_cast<long>(rng() % static_cast<std::uint64_t>(k)); };
  auto value = [&] { return make_rational(uniform(41) - 20, 1 + uniform(6)); };

  long count = 1 + uniform(max_knots);
  std::vector<Rational> xs{Rational(0)};
  while (static_cast<long>(xs.size()) < count) {
    long den = 2 + uniform(59);
    Rational x = make_rational(uniform(den), den);
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());

  std::vector<F::Knot> knots;
  for (const auto& x : xs) {
    Rational right = value();
    Rational next_left = uniform(4) == 0 ? right : value();
    Rational point = uniform(3) == 0 ? right : value();
    knots.push_back(F::Knot{x, point, right, next_left});
  }
  return F(std::move(knots));
}

Interpolant trig_interpolant(const std::function<double(double)>& f, double second_derivative_bound, int grid) {
  if (grid < 2) throw std::invalid_argument("interpolation grid needs at least two points");
  std::vector<Rational> xs;
  std::vector<Rational> ys;
  for (int i = 0; i < grid; ++i) {
    xs.push_back(make_rational(i, grid));
    ys.emplace_back(f(static_cast<double>(i) / grid));
  }
  Interpolant out{JumpPLFunction<Rational>::interpolant(xs, ys), 0, 0};
  const double h = 1.0 / grid;
  // the stored values are the doubles f rounds to, off by at most one ulp of sup|f|
  double rounding = 0;
  for (const auto& y : ys) rounding = std::max(rounding, std::abs(y.get_d()));
  rounding *= std::numeric_limits<double>::epsilon();
  out.sup_error = h * h / 8 * second_derivative_bound + rounding;
  out.var_error = h * second_derivative_bound + 2 * grid * rounding;
  return out;
}

namespace {

// Double mirror of a jump function for sup-distance evaluation.
struct LimitView {
  std::vector<double> xs, right, next_left;

  template <class S>
  explicit LimitView(const JumpPLFunction<S>& f, double scale) {
    for (const auto& k : f.knots()) {
      xs.push_back(k.x.get_d());
      right.push_back(scale * to_double(k.right));
      next_left.push_back(scale * to_double(k.next_left));
    }
  }

  double at(std::size_t i, double x) const {
    double end = i + 1 < xs.size() ? xs[i + 1] : 1.0;
    if (end <= xs[i]) return right[i];
    return right[i] + (next_left[i] - right[i]) * (x - xs[i]) / (end - xs[i]);
  }
  double right_limit(double x) const {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    return at(static_cast<std::size_t>(std::distance(xs.begin(), it)) - 1, x);
  }
  double left_limit(double x) const {
    if (x == 0) x = 1;
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    return at(static_cast<std::size_t>(std::distance(xs.begin(), it)) - 1, x);
  }
  double sup() const {
    double m = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) m = std::max({m, std::abs(right[i]), std::abs(next_left[i])});
    return m;
  }
};

double sup_distance(const LimitView& a, const LimitView& b) {
  std::vector<double> xs = a.xs;
  xs.insert(xs.end(), b.xs.begin(), b.xs.end());
  double m = 0;
  for (double x : xs) {
    m = std::max(m, std::abs(a.right_limit(x) - b.right_limit(x)));
    m = std::max(m, std::abs(a.left_limit(x) - b.left_limit(x)));
  }
  return m;
}

}  // namespace

template <class S>
Phi2Projection project_phi2(const PiecewiseLinearLift& lift, const JumpPLFunction<S>& f, int n) {
  if (n < 1) throw std::invalid_argument("project_phi2 needs n >= 1");
  const double inv_lambda = 1.0 / lambda2().to_double();
  JumpPLFunction<S> h = f - JumpPLFunction<S>::constant(f.integral());
  Phi2Projection out;
  out.n = n;
  LimitView previous(h, 1.0);
  double scale = 1.0;
  for (int k = 1; k <= n; ++k) {
    h = apply_P(lift, h);
    scale *= inv_lambda;
    LimitView current(h, scale);
    out.increments.push_back(sup_distance(current, previous));
    if (k == n) out.sup_norm = current.sup();
    previous = std::move(current);
  }
  out.increment = out.increments.back();
  if (n >= 10 && out.increment > 0 && out.increment > out.increments[static_cast<std::size_t>(n / 2 - 1)])
    throw DivergenceError("projection increments grow; f is outside the expected domain");
  QuadSurd factor = pow(QuadSurd(1) / lambda2(), static_cast<unsigned>(n));
  out.value = h.template cast<QuadSurd>().scaled(factor);
  return out;
}

template Phi2Projection project_phi2<Rational>(const PiecewiseLinearLift&, const JumpPLFunction<Rational>&, int);
template Phi2Projection project_phi2<QuadSurd>(const PiecewiseLinearLift&, const JumpPLFunction<QuadSurd>&, int);

std::optional<StepEigenpair> subdominant_step_eigenfunction(const PiecewiseLinearLift& lift) {
  MarkovReport report = markov_check(lift);
  if (!report.markov) return std::nullopt;
  TransitionMatrix tm = transition_matrix(lift, report.q);
  for (const auto& e : eigenvalues(tm.entries)) {
    if (!e.exact || e.multiplicity != 1 || e.exact->radicand() < 0) continue;
    if (*e.exact == QuadSurd(1) || *e.exact == QuadSurd(0)) continue;
    std::vector<QuadSurd> v = left_eigenvector(tm.entries, *e.exact);
    return StepEigenpair{*e.exact, JumpPLFunction<QuadSurd>::step(v)};
  }
  return std::nullopt;
}

std::vector<NamedFunction> function_battery(const PiecewiseLinearLift& lift, std::uint64_t seed) {
  using Q = JumpPLFunction<QuadSurd>;
  std::vector<NamedFunction> out;
  out.push_back({"one", Q::constant(QuadSurd(1))});
  if (auto pair = subdominant_step_eigenfunction(lift)) {
    out.push_back({"step_eigenfunction", pair->function});
  } else {
    out.push_back({"indicator_quarter", Q::constant(QuadSurd(1)).restricted(make_rational(1, 4), make_rational(3, 4))});
  }
  {
    std::vector<Q::Knot> saw{{Rational(0), QuadSurd(0), QuadSurd(0), QuadSurd(1)}};
    out.push_back({"sawtooth", Q(std::move(saw))});
  }
  out.push_back({"indicator_third", Q::constant(QuadSurd(1)).restricted(Rational(0), make_rational(1, 3))});
  {
    std::vector<Rational> xs{Rational(0), make_rational(1, 2)};
    std::vector<QuadSurd> ys{QuadSurd(0), QuadSurd(1)};
    out.push_back({"hat", Q::interpolant(xs, ys)});
  }
  out.push_back({"cosine", trig_interpolant([](double x) { return std::cos(2 * M_PI * x); }, 4 * M_PI * M_PI, 64)
                               .f.cast<QuadSurd>()});
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 4; ++i)
    out.push_back({"random_" + std::to_string(i), random_jump_function(rng).cast<QuadSurd>()});
  return out;
}

}  // namespace pfc
