#include "pfc/circlemap.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pfc {

PiecewiseLinearLift PiecewiseLinearLift::build(long p, std::vector<Rational> breaks, std::vector<Rational> slopes) {
  if (p < 1) throw LiftError("lift period must be a positive integer");
  if (breaks.size() < 2) throw LiftError("lift needs at least two breaks");
  if (slopes.size() + 1 != breaks.size())
    throw LiftError("expected " + std::to_string(breaks.size() - 1) + " slopes, got " + std::to_string(slopes.size()));
  if (breaks.front() != 0 || breaks.back() != p) throw LiftError("breaks must run from 0 to p");
  for (std::size_t k = 1; k < breaks.size(); ++k)
    if (breaks[k] <= breaks[k - 1]) throw LiftError("breaks must be strictly increasing");

  PiecewiseLinearLift lift;
  lift.p_ = p;
  lift.break_values_.reserve(breaks.size());
  lift.break_values_.emplace_back(0);
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    if (slopes[k] <= 0 || slopes[k] > 1)
      throw LiftError("slope " + to_string(slopes[k]) + " outside (0, 1]");
    lift.break_values_.emplace_back(lift.break_values_.back() + slopes[k] * (breaks[k + 1] - breaks[k]));
  }
  if (lift.break_values_.back() != 1)
    throw LiftError("weighted slope sum is " + to_string(lift.break_values_.back()) + ", must be 1");

  lift.min_slope_ = *std::min_element(slopes.begin(), slopes.end());
  lift.max_slope_ = *std::max_element(slopes.begin(), slopes.end());
  lift.breaks_ = std::move(breaks);
  lift.slopes_ = std::move(slopes);

  // Split at integers so every branch piece sits inside one [m, m+1].
  std::set<Rational> cuts(lift.breaks_.begin(), lift.breaks_.end());
  for (long m = 0; m <= p; ++m) cuts.insert(Rational(m));
  std::vector<Rational> all(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    BranchPiece piece;
    piece.lo = all[i];
    piece.hi = all[i + 1];
    piece.slope = lift.slope_at(piece.lo);
    piece.tau_lo = lift.tau(piece.lo);
    piece.tau_hi = lift.tau(piece.hi);
    piece.offset = floor_integer(piece.lo).get_si();
    lift.pieces_.push_back(std::move(piece));
  }
  return lift;
}

std::size_t PiecewiseLinearLift::piece_index(const Rational& r) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
  return static_cast<std::size_t>(std::distance(breaks_.begin(), it)) - 1;
}

Rational PiecewiseLinearLift::tau(const Rational& x) const {
  Rational m = floor_rational(Rational(x / p_));
  Rational r = x - m * p_;
  std::size_t k = piece_index(r);
  return break_values_[k] + slopes_[k] * (r - breaks_[k]) + m;
}

Rational PiecewiseLinearLift::tau_inverse(const Rational& y) const {
  Rational m = floor_rational(y);
  Rational r = y - m;
  auto it = std::upper_bound(break_values_.begin(), break_values_.end(), r);
  auto k = static_cast<std::size_t>(std::distance(break_values_.begin(), it)) - 1;
  return breaks_[k] + (r - break_values_[k]) / slopes_[k] + m * p_;
}

const Rational& PiecewiseLinearLift::slope_at(const Rational& x) const {
  Rational r = x - floor_rational(Rational(x / p_)) * p_;
  return slopes_[piece_index(r)];
}

bool PiecewiseLinearLift::is_break(const Rational& x) const {
  Rational r = x - floor_rational(Rational(x / p_)) * p_;
  return std::binary_search(breaks_.begin(), breaks_.end(), r);
}

PiecewiseLinearLift build_lift(long p, std::vector<Rational> breaks, std::vector<Rational> slopes) {
  return PiecewiseLinearLift::build(p, std::move(breaks), std::move(slopes));
}

PiecewiseLinearLift keller_rugh() {
  std::vector<Rational> breaks;
  for (long k = 0; k <= 12; ++k) breaks.push_back(make_rational(k, 6));
  const long num[12] = {2, 1, 1, 1, 2, 1, 1, 2, 1, 1, 1, 2};
  const long den[12] = {3, 3, 2, 2, 3, 3, 3, 3, 2, 2, 3, 3};
  std::vector<Rational> slopes;
  for (int k = 0; k < 12; ++k) slopes.push_back(make_rational(num[k], den[k]));
  return PiecewiseLinearLift::build(2, std::move(breaks), std::move(slopes));
}

PiecewiseLinearLift doubling_map() {
  return PiecewiseLinearLift::build(2, {Rational(0), Rational(2)}, {make_rational(1, 2)});
}

Rational eval_tau(const PiecewiseLinearLift& lift, const Rational& x) { return lift.tau(x); }

Rational eval_tau_inv(const PiecewiseLinearLift& lift, const Rational& y) { return lift.tau_inverse(y); }

Rational map_T(const PiecewiseLinearLift& lift, const Rational& x) { return frac(lift.tau_inverse(frac(x))); }

std::vector<Rational> preimages(const PiecewiseLinearLift& lift, const Rational& x) {
  Rational r = frac(x);
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(lift.period()));
  for (long j = 0; j < lift.period(); ++j) out.push_back(lift.tau(r + j));
  return out;
}

Rational weight_g(const PiecewiseLinearLift& lift, const Rational& x) {
  Rational y = lift.tau_inverse(frac(x));
  if (lift.is_break(y)) return Rational(0);
  return lift.slope_at(y);
}

std::vector<Rational> singular_set(const PiecewiseLinearLift& lift) {
  std::set<Rational> s;
  for (const auto& b : lift.breaks()) s.insert(frac(lift.tau(b)));
  return {s.begin(), s.end()};
}

std::vector<Rational> critical_images(const PiecewiseLinearLift& lift) {
  std::set<Rational> s;
  for (const auto& b : lift.breaks()) s.insert(frac(b));
  return {s.begin(), s.end()};
}

namespace {

// Positions in the original circle are alpha + beta * t for t in the
// current coordinate [u, v].
void visit_cylinders(const PiecewiseLinearLift& lift, int level, const Rational& u, const Rational& v,
                     const Rational& alpha, const Rational& beta, const Rational& weight,
                     const CylinderVisitor& visit) {
  for (const auto& piece : lift.branch_pieces()) {
    if (piece.tau_hi <= u) continue;
    if (piece.tau_lo >= v) break;
    const Rational& lo = piece.tau_lo > u ? piece.tau_lo : u;
    const Rational& hi = piece.tau_hi < v ? piece.tau_hi : v;
    Rational w = weight * piece.slope;
    if (level == 1) {
      visit(Rational(alpha + beta * lo), Rational(alpha + beta * hi), w);
      continue;
    }
    // T restricted to this piece: t -> piece.lo - m + (t - tau_lo)/slope.
    Rational shift = piece.lo - piece.offset;
    Rational y_lo = shift + (lo - piece.tau_lo) / piece.slope;
    Rational y_hi = shift + (hi - piece.tau_lo) / piece.slope;
    Rational next_alpha = alpha + beta * (piece.tau_lo - piece.slope * shift);
    Rational next_beta = beta * piece.slope;
    visit_cylinders(lift, level - 1, y_lo, y_hi, next_alpha, next_beta, w, visit);
  }
}

}  // namespace

void for_each_cylinder(const PiecewiseLinearLift& lift, int N, const CylinderVisitor& visit) {
  if (N < 1) throw std::invalid_argument("cylinder depth must be >= 1");
  visit_cylinders(lift, N, Rational(0), Rational(1), Rational(0), Rational(1), Rational(1), visit);
}

DerivativeBound derivative_inf(const PiecewiseLinearLift& lift, int k) {
  if (k < 1) throw std::invalid_argument("derivative_inf needs k >= 1");
  Rational sup(0);
  for_each_cylinder(lift, k, [&](const Rational&, const Rational&, const Rational& w) {
    if (w > sup) sup = w;
  });
  DerivativeBound out;
  out.inf_derivative = 1 / sup;
  out.theta = std::pow(sup.get_d(), 1.0 / k);
  return out;
}

bool is_markov_on_grid(const PiecewiseLinearLift& lift, long q) {
  if (q < 1) return false;
  auto on_grid = [q](const Rational& x) { return Rational(x * q).get_den() == 1; };
  for (const auto& b : lift.breaks())
    if (!on_grid(b)) return false;
  for (long j = 0; j <= q; ++j)
    if (!on_grid(lift.tau_inverse(make_rational(j, q)))) return false;
  return true;
}

MarkovReport markov_check(const PiecewiseLinearLift& lift, long max_q) {
  MarkovReport report;
  for (long q = 1; q <= max_q; ++q) {
    if (is_markov_on_grid(lift, q)) {
      report.markov = true;
      report.q = q;
      break;
    }
  }
  for (const auto& piece : lift.branch_pieces()) {
    BranchImage img;
    img.domain_lo = piece.tau_lo;
    img.domain_hi = piece.tau_hi;
    img.image_lo = piece.lo - piece.offset;
    img.image_hi = piece.hi - piece.offset;
    if (report.markov) {
      img.endpoints_on_grid = Rational(img.image_lo * report.q).get_den() == 1 &&
                              Rational(img.image_hi * report.q).get_den() == 1;
    }
    report.branches.push_back(std::move(img));
  }
  return report;
}

std::string MarkovReport::summary() const {
  if (!markov) return "not Markov on tested grids";
  return "Markov, q=" + std::to_string(q);
}

PiecewiseLinearLift lift_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw LiftError("lift definition must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "p" && key != "breaks" && key != "slopes") throw LiftError("unknown lift key '" + key + "'");
  if (!j.contains("p") || !j.contains("breaks") || !j.contains("slopes"))
    throw LiftError("lift definition needs p, breaks and slopes");
  auto read_list = [](const nlohmann::json& arr) {
    if (!arr.is_array()) throw LiftError("breaks/slopes must be arrays");
    std::vector<Rational> out;
    for (const auto& e : arr) {
      if (e.is_string()) {
        out.push_back(parse_rational(e.get<std::string>()));
      } else if (e.is_number_integer()) {
        out.emplace_back(e.get<long>());
      } else {
        throw LiftError("rationals must be strings \"num/den\"");
      }
    }
    return out;
  };
  if (!j["p"].is_number_integer()) throw LiftError("p must be an integer");
  return PiecewiseLinearLift::build(j["p"].get<long>(), read_list(j["breaks"]), read_list(j["slopes"]));
}

nlohmann::json lift_to_json(const PiecewiseLinearLift& lift) {
  nlohmann::json j;
  j["p"] = lift.period();
  j["breaks"] = nlohmann::json::array();
  for (const auto& b : lift.breaks()) j["breaks"].push_back(to_fraction_string(b));
  j["slopes"] = nlohmann::json::array();
  for (const auto& s : lift.slopes()) j["slopes"].push_back(to_fraction_string(s));
  return j;
}

}  // namespace pfc
