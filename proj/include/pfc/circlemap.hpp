#ifndef PFC_CIRCLEMAP_HPP
#define PFC_CIRCLEMAP_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "pfc/rational.hpp"

namespace pfc {

class LiftError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear piece of a lift restricted to [m, m+1] for one integer m, so that
/// the expanding map T is a single affine branch on the circle interval
/// [tau_lo, tau_hi] and maps it onto [lo - m, hi - m].
struct BranchPiece {
  Rational lo, hi;          // lift coordinates, m <= lo < hi <= m + 1
  Rational tau_lo, tau_hi;  // circle coordinates in [0, 1]
  Rational slope;
  long offset = 0;  // m
};

/// Continuous strictly increasing piecewise-linear tau: R -> R with
/// tau(0) = 0 and tau(x + p) = tau(x) + 1. One period is stored as breaks
/// 0 = b_0 < ... < b_K = p with slope s_k on (b_{k-1}, b_k). The expanding
/// circle map is T(x) = tau^{-1}(x) mod 1 and its weight g = 1/|T'|.
/// Immutable once built.
class PiecewiseLinearLift {
 public:
  /// Validates monotone breaks from 0 to p, slopes in (0, 1], and the
  /// normalization sum_k s_k (b_k - b_{k-1}) = 1. Throws LiftError.
  static PiecewiseLinearLift build(long p, std::vector<Rational> breaks, std::vector<Rational> slopes);

  long period() const { return p_; }
  const std::vector<Rational>& breaks() const { return breaks_; }
  const std::vector<Rational>& slopes() const { return slopes_; }
  /// tau at each break, tau(b_0) = 0 ... tau(b_K) = 1.
  const std::vector<Rational>& break_values() const { return break_values_; }
  const std::vector<BranchPiece>& branch_pieces() const { return pieces_; }

  Rational tau(const Rational& x) const;
  Rational tau_inverse(const Rational& y) const;
  /// Slope of the piece containing x (right-continuous at breaks).
  const Rational& slope_at(const Rational& x) const;
  /// x mod p is one of the breaks.
  bool is_break(const Rational& x) const;

  const Rational& min_slope() const { return min_slope_; }
  const Rational& max_slope() const { return max_slope_; }

 private:
  PiecewiseLinearLift() = default;
  std::size_t piece_index(const Rational& r) const;  // r in [0, p)

  long p_ = 0;
  std::vector<Rational> breaks_;
  std::vector<Rational> slopes_;
  std::vector<Rational> break_values_;
  std::vector<BranchPiece> pieces_;
  Rational min_slope_, max_slope_;
};

/// p = 2 with the twelve slopes 2/3,1/3,1/2,1/2,2/3,1/3,1/3,2/3,1/2,1/2,1/3,2/3
/// on the intervals ((k-1)/6, k/6).
PiecewiseLinearLift keller_rugh();

/// tau(x) = x/2, i.e. T x = 2x mod 1.
PiecewiseLinearLift doubling_map();

PiecewiseLinearLift build_lift(long p, std::vector<Rational> breaks, std::vector<Rational> slopes);

Rational eval_tau(const PiecewiseLinearLift& lift, const Rational& x);
Rational eval_tau_inv(const PiecewiseLinearLift& lift, const Rational& y);

/// T(x) in [0, 1).
Rational map_T(const PiecewiseLinearLift& lift, const Rational& x);

/// The p preimages tau(x + j), j = 0..p-1, of x under T (x taken mod 1).
std::vector<Rational> preimages(const PiecewiseLinearLift& lift, const Rational& x);

/// g(x) = slope of tau at tau^{-1}(x), and 0 on the singular set S.
Rational weight_g(const PiecewiseLinearLift& lift, const Rational& x);

/// S = tau(breaks) mod 1 (this contains tau of the integers when the
/// integers are breaks), sorted in [0, 1). These are the points where g
/// is set to zero.
std::vector<Rational> singular_set(const PiecewiseLinearLift& lift);

/// C = breaks mod 1: the image T(S), where every Pf vanishes.
std::vector<Rational> critical_images(const PiecewiseLinearLift& lift);

/// Visits, left to right, every N-cylinder of the branch partition (the
/// maximal intervals on which T^N is one affine branch) together with the
/// product of slopes g(x) g(Tx) ... g(T^{N-1}x) on its interior. The
/// endpoints of cylinders are exactly the points of S_N, where g_N = 0.
using CylinderVisitor = std::function<void(const Rational& lo, const Rational& hi, const Rational& weight)>;
void for_each_cylinder(const PiecewiseLinearLift& lift, int N, const CylinderVisitor& visit);

struct DerivativeBound {
  Rational inf_derivative;  // inf_x |(T^k)'(x)| over x off S_k
  double theta = 0;         // inf^{-1/k}
};

/// Exact min over k-cylinders of the product of reciprocal slopes.
DerivativeBound derivative_inf(const PiecewiseLinearLift& lift, int k);

struct BranchImage {
  Rational domain_lo, domain_hi;  // circle interval of the branch piece
  Rational image_lo, image_hi;    // its T-image in [0, 1]
  bool endpoints_on_grid = false;
};

struct MarkovReport {
  bool markov = false;
  long q = 0;  // smallest grid 1/q on which the map is Markov (0 if none)
  std::vector<BranchImage> branches;
  std::string summary() const;
};

/// The map is Markov on the grid {j/q} when every break lies on the grid
/// and tau^{-1}(j/q) is on the grid for j = 0..q, i.e. each grid cell of
/// the lift maps into one atom I_j = ((j-1)/q, j/q). Grids q = 1..max_q
/// are tried.
MarkovReport markov_check(const PiecewiseLinearLift& lift, long max_q = 64);
bool is_markov_on_grid(const PiecewiseLinearLift& lift, long q);

/// {"p": 2, "breaks": ["0/1", ...], "slopes": ["2/3", ...]}
PiecewiseLinearLift lift_from_json(const nlohmann::json& j);
nlohmann::json lift_to_json(const PiecewiseLinearLift& lift);

}  // namespace pfc

#endif  // PFC_CIRCLEMAP_HPP
