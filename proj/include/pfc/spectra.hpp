#ifndef PFC_SPECTRA_HPP
#define PFC_SPECTRA_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pfc/dense_eigen.hpp"
#include "pfc/mollifier.hpp"

namespace pfc {

class IdentificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix of P_delta on the trigonometric modes e_n, n = -K..K (N = 2K+1),
/// by collocation at x_i = i/N: column n holds the discrete Fourier
/// coefficients of (P_delta e_n)(x_i). Row and column index k stand for
/// mode k - K.
struct SpectralOperator {
  std::size_t N = 0;
  long K = 0;
  double delta = 0;
  ComplexMatrix A;
  /// max over seeded smooth test functions of |(A h)(x) - (P_delta h)(x)|
  /// at off-grid points.
  double assembly_residual = 0;
  /// max |A_{-m,-n} - conj(A_{m,n})|
  double conjugate_defect = 0;
  /// max |A e_0 - e_0|
  double mode0_defect = 0;

  std::size_t index(long mode) const { return static_cast<std::size_t>(mode + K); }
};

SpectralOperator assemble(const MollifiedLift& m, std::size_t N, std::uint64_t seed = 13);

/// Grid size whose mode range doubles, 2N - 1.
inline std::size_t refine(std::size_t N) { return 2 * N - 1; }

struct DecayFit {
  double rho_hat = 0;  // -slope / (2 pi) of log|c_n| against n
  double fit_r2 = 0;
  std::size_t modes = 0;  // usable modes n >= 1 with |c_n| > floor
  /// The same fit applied to the tail envelope max_{m >= n} |c_m|.
  double envelope_rho = 0;
  double envelope_r2 = 0;
};

/// Least-squares fit log|c_n| = a - 2 pi rho |n| over n >= 1 with
/// |c_n| > floor. Throws std::invalid_argument with fewer than three
/// usable modes.
DecayFit decay_rate(const std::vector<Complex>& c, double floor = 1e-13);

struct SpectrumEntry {
  Complex value;
  double residual = 0;
  /// Eigenvalues outside the 0.7 circle are re-solved at refine(N); the
  /// others are labeled not converged.
  bool checked = false;
  bool converged = false;
  double moved = 0;
};

struct SpectrumReport {
  double delta = 0;
  std::size_t N = 0;
  std::vector<SpectrumEntry> eigenvalues;  // decreasing modulus, top_k
  std::size_t outside_07 = 0;              // number of eigenvalues with |z| > 0.7
  Complex lambda_delta;
  bool isolated = false;  // |lambda_delta| > 0.7
  double gap = 0;         // |lambda_delta - lambda_2|
  bool converged = false; // all eigenvalues outside 0.7 stable under refine(N)
  double ess_radius_bound = 0;
  std::optional<DecayFit> decay;
  double assembly_residual = 0;
};

struct SpectrumOptions {
  std::size_t top_k = 10;
  int k_max = 10;
  double threshold = 0.7;
  double converge_tol = 1e-8;
  bool refine = true;
  bool fit_decay = true;
};

/// lambda_delta is the eigenvalue nearest lambda_2 once the eigenvalue 1 is
/// set aside; two candidates within 1e-12 of the same distance raise
/// IdentificationError.
std::size_t identify_lambda(const std::vector<Complex>& values);

SpectrumReport leading_spectrum(const MollifiedLift& m, std::size_t N, const SpectrumOptions& options = {});

nlohmann::json spectrum_report_json(const SpectrumReport& r);

struct Eigenfunction {
  Complex value;
  std::vector<Complex> coefficients;  // modes -K..K, unit 2-norm
  double residual = 0;
};

/// Eigenvector of the assembled operator for the eigenvalue nearest
/// target, made real (c_{-n} = conj c_n) with Re c_1 >= 0 (Re c_0 >= 0
/// when c_1 vanishes). Throws IdentificationError when that eigenvalue is
/// not isolated: within 1e-6 of another one, or farther from target than
/// from its nearest neighbour.
Eigenfunction eigenfunction(const SpectralOperator& op, Complex target);
Eigenfunction eigenfunction(const MollifiedLift& m, std::size_t N, Complex target);

/// Value of the trigonometric series at x.
Complex evaluate_modes(const std::vector<Complex>& c, double x);

/// min_{k <= k_max} theta_k^delta from the grid infimum of |(T_delta^k)'|.
double ess_radius_bound(const MollifiedLift& m, int k_max);

struct SweepRow {
  double delta = 0;
  Complex lambda;
  double gap = 0;
  double ess_bound = 0;
  std::size_t N_used = 0;       // lambda(N_used) vs lambda(refine(N_used)) agree to tol
  bool converged = false;
  double refine_diff = 0;
  std::size_t outside_07 = 0;   // counted on the dense spectrum at N_used
  bool chain = false;           // ess < 0.7 < 0.75 < |lambda|, lambda real negative
};

struct SweepOptions {
  std::size_t N0 = 513;
  std::size_t n_cap = 8193;
  int k_max = 10;
  double tol = 1e-8;
  MollifierOptions mollifier;
};

/// Per delta: dense spectrum at N0 to identify lambda_delta, inverse
/// iteration at N, refine(N), ... until two successive values agree, then
/// a dense spectrum at the accepted N for the count outside 0.7.
std::vector<SweepRow> delta_sweep(const PiecewiseLinearLift& lift, const std::vector<double>& deltas,
                                  const SweepOptions& options = {});

/// The half-decade sweep 10^-1, 10^-1.5, ..., 10^-3.
std::vector<double> default_deltas();

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Little-endian dump: "PFCMODES", u32 version 1, u32 N, f64 delta,
/// f64 target re, f64 target im, then N interleaved (re, im) f64 pairs.
void write_mode_dump(std::ostream& os, double delta, Complex target, const std::vector<Complex>& c);
std::vector<Complex> read_mode_dump(std::istream& is, double* delta = nullptr, Complex* target = nullptr);

}  // namespace pfc

#endif  // PFC_SPECTRA_HPP
