#include "pfc/spectra.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <random>

#include "pfc/steptransfer.hpp"

namespace pfc {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

Eigenfunction eigenfunction_from(const SpectralOperator& op, const DenseEigenResult& eig, Complex target);

}  // namespace

Complex evaluate_modes(const std::vector<Complex>& c, double x) {
  const long K = static_cast<long>(c.size() - 1) / 2;
  Complex total(0);
  for (long n = -K; n <= K; ++n) total += c[static_cast<std::size_t>(n + K)] * std::polar(1.0, kTwoPi * n * x);
  return total;
}

SpectralOperator assemble(const MollifiedLift& m, std::size_t N, std::uint64_t seed) {
  if (N < 33 || N % 2 == 0) throw std::invalid_argument("grid size must be odd and at least 33");
  SpectralOperator op;
  op.N = N;
  op.K = static_cast<long>(N - 1) / 2;
  op.delta = m.delta();
  op.A = ComplexMatrix(N);
  const long K = op.K;
  const long p = m.period();

  std::vector<double> weight(N * static_cast<std::size_t>(p)), image(N * static_cast<std::size_t>(p));
  for (std::size_t i = 0; i < N; ++i) {
    double x = static_cast<double>(i) / static_cast<double>(N);
    for (long j = 0; j < p; ++j) {
      double z = x + static_cast<double>(j);
      weight[i * static_cast<std::size_t>(p) + static_cast<std::size_t>(j)] = m.dtau(z);
      double y = m.tau(z);
      image[i * static_cast<std::size_t>(p) + static_cast<std::size_t>(j)] = y - std::floor(y);
    }
  }

  std::vector<Complex> samples(N);
  std::vector<Complex> out(N);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(N), reinterpret_cast<fftw_complex*>(samples.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  for (long n = -K; n <= K; ++n) {
    for (std::size_t i = 0; i < N; ++i) {
      Complex s(0);
      for (long j = 0; j < p; ++j) {
        std::size_t at = i * static_cast<std::size_t>(p) + static_cast<std::size_t>(j);
        s += weight[at] * std::polar(1.0, kTwoPi * static_cast<double>(n) * image[at]);
      }
      samples[i] = s;
    }
    fftw_execute(plan);
    Complex* col = op.A.column(op.index(n));
    for (long k = -K; k <= K; ++k) {
      std::size_t src = static_cast<std::size_t>((k % static_cast<long>(N) + static_cast<long>(N)) % static_cast<long>(N));
      col[op.index(k)] = out[src] / static_cast<double>(N);
    }
  }
  fftw_destroy_plan(plan);

  for (long k = -K; k <= K; ++k) {
    Complex expect = k == 0 ? Complex(1) : Complex(0);
    op.mode0_defect = std::max(op.mode0_defect, std::abs(op.A(op.index(k), op.index(0)) - expect));
    for (long n = -K; n <= K; ++n)
      op.conjugate_defect = std::max(op.conjugate_defect, std::abs(op.A(op.index(-k), op.index(-n)) -
                                                                   std::conj(op.A(op.index(k), op.index(n)))));
  }

  // collocation consistency on seeded real trigonometric polynomials
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() % 2000001) / 1000000.0 - 1.0; };
  for (int trial = 0; trial < 5; ++trial) {
    const long degree = std::min<long>(8, K);
    std::vector<Complex> h(N, Complex(0));
    for (long n = 0; n <= degree; ++n) {
      Complex c(unit(), n == 0 ? 0.0 : unit());
      h[op.index(n)] = c;
      if (n > 0) h[op.index(-n)] = std::conj(c);
    }
    std::vector<Complex> ah = op.A.apply(h);
    auto hf = [&](double x) { return evaluate_modes(h, x).real(); };
    for (int s = 0; s < 16; ++s) {
      double x = (static_cast<double>(s) + 0.37) / 16.0;
      double direct = apply_P_delta(m, hf, x);
      op.assembly_residual = std::max(op.assembly_residual, std::abs(evaluate_modes(ah, x) - direct));
    }
  }
  return op;
}

DecayFit decay_rate(const std::vector<Complex>& c, double floor) {
  const long K = static_cast<long>(c.size() - 1) / 2;
  std::vector<double> mag;
  for (long n = 1; n <= K; ++n) mag.push_back(std::abs(c[static_cast<std::size_t>(n + K)]));
  std::vector<double> envelope(mag.size());
  double running = 0;
  for (std::size_t i = mag.size(); i-- > 0;) {
    running = std::max(running, mag[i]);
    envelope[i] = running;
  }

  auto fit = [&](const std::vector<double>& values, double& rho, double& r2) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] > floor) {
        xs.push_back(static_cast<double>(i + 1));
        ys.push_back(std::log(values[i]));
      }
    }
    if (xs.size() < 3) throw std::invalid_argument("too few usable modes for a decay fit");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    double slope = sxy / sxx;
    double ss_res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = ys[i] - (my + slope * (xs[i] - mx));
      ss_res += r * r;
    }
    rho = -slope / kTwoPi;
    r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return xs.size();
  };

  DecayFit out;
  out.modes = fit(mag, out.rho_hat, out.fit_r2);
  fit(envelope, out.envelope_rho, out.envelope_r2);
  return out;
}

std::size_t identify_lambda(const std::vector<Complex>& values) {
  const Complex target = lambda2().to_complex();
  std::optional<std::size_t> best;
  double best_d = 0, second_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - 1.0) < 1e-8) continue;
    double d = std::abs(values[i] - target);
    if (!best || d < best_d) {
      if (best) second_d = best_d;
      best = i;
      best_d = d;
    } else if (d < second_d) {
      second_d = d;
    }
  }
  if (!best) throw IdentificationError("no eigenvalue other than 1");
  // a conjugate pair is equidistant from the real target
  if (second_d - best_d < 1e-12)
    throw IdentificationError("two eigenvalues are equally close to lambda_2");
  return *best;
}

double ess_radius_bound(const MollifiedLift& m, int k_max) {
  std::vector<double> theta = theta_profile_delta(m, k_max);
  return *std::min_element(theta.begin(), theta.end());
}

SpectrumReport leading_spectrum(const MollifiedLift& m, std::size_t N, const SpectrumOptions& options) {
  SpectralOperator op = assemble(m, N);
  DenseEigenResult eig = eig_dense(op.A, true);

  std::vector<std::size_t> order(eig.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double ma = std::abs(eig.values[a]), mb = std::abs(eig.values[b]);
    if (ma != mb) return ma > mb;
    return eig.values[a].imag() > eig.values[b].imag();
  });

  SpectrumReport r;
  r.delta = m.delta();
  r.N = N;
  r.assembly_residual = op.assembly_residual;
  for (const auto& z : eig.values)
    if (std::abs(z) > options.threshold) ++r.outside_07;

  std::optional<SpectralOperator> fine;
  if (options.refine && r.outside_07 > 0) fine = assemble(m, refine(N));
  r.converged = true;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    std::size_t i = order[rank];
    SpectrumEntry e;
    e.value = eig.values[i];
    e.residual = eig.residuals[i];
    if (fine && std::abs(e.value) > options.threshold) {
      ShiftInvertResult s = shift_invert(fine->A, e.value);
      e.checked = true;
      e.moved = std::abs(s.value - e.value);
      e.converged = s.converged && e.moved < options.converge_tol;
      r.converged = r.converged && e.converged;
    }
    if (rank < options.top_k || e.checked) r.eigenvalues.push_back(e);
  }
  if (!fine) r.converged = false;

  std::size_t li = identify_lambda(eig.values);
  r.lambda_delta = eig.values[li];
  r.isolated = std::abs(r.lambda_delta) > options.threshold;
  r.gap = std::abs(r.lambda_delta - lambda2().to_complex());
  r.ess_radius_bound = ess_radius_bound(m, options.k_max);
  if (options.fit_decay) {
    Eigenfunction ef = eigenfunction_from(op, eig, r.lambda_delta);
    r.decay = decay_rate(ef.coefficients);
  }
  return r;
}

nlohmann::json spectrum_report_json(const SpectrumReport& r) {
  nlohmann::json j;
  j["schema"] = "1";
  j["delta"] = r.delta;
  j["N"] = r.N;
  j["eigenvalues"] = nlohmann::json::array();
  for (const auto& e : r.eigenvalues) {
    nlohmann::json entry{{"re", e.value.real()},
                         {"im", e.value.imag()},
                         {"abs", std::abs(e.value)},
                         {"residual", e.residual},
                         {"converged", e.converged}};
    if (e.checked) entry["moved"] = e.moved;
    j["eigenvalues"].push_back(std::move(entry));
  }
  j["outside_0.7"] = r.outside_07;
  j["lambda_delta"] = {{"re", r.lambda_delta.real()}, {"im", r.lambda_delta.imag()}, {"abs", std::abs(r.lambda_delta)}};
  j["isolated"] = r.isolated;
  j["gap_to_lambda2"] = r.gap;
  j["converged"] = r.converged;
  j["ess_radius_bound"] = r.ess_radius_bound;
  j["assembly_residual"] = r.assembly_residual;
  if (r.decay) {
    j["decay"] = {{"rho_hat", r.decay->rho_hat},
                  {"fit_r2", r.decay->fit_r2},
                  {"modes", r.decay->modes},
                  {"envelope_rho", r.decay->envelope_rho},
                  {"envelope_r2", r.decay->envelope_r2}};
  }
  return j;
}

namespace {

Eigenfunction eigenfunction_from(const SpectralOperator& op, const DenseEigenResult& eig, Complex target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < eig.values.size(); ++i)
    if (std::abs(eig.values[i] - target) < std::abs(eig.values[best] - target)) best = i;
  const Complex value = eig.values[best];
  double neighbour = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eig.values.size(); ++i)
    if (i != best) neighbour = std::min(neighbour, std::abs(eig.values[i] - value));
  if (neighbour < 1e-6 || std::abs(value - target) >= neighbour)
    throw IdentificationError("eigenvalue near the target is not isolated at this N");

  ShiftInvertResult s = shift_invert(op.A, value + Complex(1e-10, 0));
  if (!s.converged) throw ConvergenceError("inverse iteration did not converge");
  std::vector<Complex> v = s.vector;

  // for a real operator, v -> R v with (R v)_n = conj(v_{-n}) maps the
  // eigenspace of a real eigenvalue to itself
  const long K = op.K;
  std::vector<Complex> w(v.size());
  for (long n = -K; n <= K; ++n) w[op.index(n)] = v[op.index(n)] + std::conj(v[op.index(-n)]);
  double norm = 0;
  for (const auto& z : w) norm += std::norm(z);
  if (norm < 1e-20) {
    for (long n = -K; n <= K; ++n) w[op.index(n)] = Complex(0, 1) * (v[op.index(n)] - std::conj(v[op.index(-n)]));
    norm = 0;
    for (const auto& z : w) norm += std::norm(z);
  }
  norm = std::sqrt(norm);
  for (auto& z : w) z /= norm;
  double sign_ref = w[op.index(1)].real();
  if (std::abs(sign_ref) < 1e-12) sign_ref = w[op.index(0)].real();
  if (sign_ref < 0)
    for (auto& z : w) z = -z;

  Eigenfunction out;
  out.value = s.value;
  out.coefficients = std::move(w);
  std::vector<Complex> aw = op.A.apply(out.coefficients);
  double res = 0;
  for (std::size_t i = 0; i < aw.size(); ++i) res += std::norm(aw[i] - out.value * out.coefficients[i]);
  out.residual = std::sqrt(res);
  return out;
}

}  // namespace

Eigenfunction eigenfunction(const SpectralOperator& op, Complex target) {
  return eigenfunction_from(op, eig_dense(op.A, false), target);
}

Eigenfunction eigenfunction(const MollifiedLift& m, std::size_t N, Complex target) {
  return eigenfunction(assemble(m, N), target);
}

std::vector<double> default_deltas() {
  std::vector<double> out;
  for (int i = 2; i <= 6; ++i) out.push_back(std::pow(10.0, -0.5 * i));
  return out;
}

std::vector<SweepRow> delta_sweep(const PiecewiseLinearLift& lift, const std::vector<double>& deltas,
                                  const SweepOptions& options) {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0)) throw std::invalid_argument("sweep widths must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw std::invalid_argument("sweep widths must be decreasing");
  }
  std::vector<SweepRow> rows;
  for (double delta : deltas) {
    MollifiedLift m(lift, delta, options.mollifier);
    SweepRow row;
    row.delta = delta;

    std::size_t N = options.N0;
    SpectralOperator op = assemble(m, N);
    DenseEigenResult coarse = eig_dense(op.A, false);
    Complex value = coarse.values[identify_lambda(coarse.values)];
    ShiftInvertResult s = shift_invert(op.A, value);
    value = s.value;
    while (refine(N) <= options.n_cap) {
      ShiftInvertResult next = shift_invert(assemble(m, refine(N)).A, value);
      row.refine_diff = std::abs(next.value - value);
      if (row.refine_diff < options.tol) {
        row.converged = true;
        break;
      }
      N = refine(N);
      value = next.value;
    }
    row.N_used = N;
    row.lambda = value;
    row.gap = std::abs(value - lambda2().to_complex());
    row.ess_bound = ess_radius_bound(m, options.k_max);

    DenseEigenResult dense = N == options.N0 ? std::move(coarse) : eig_dense(assemble(m, N).A, false);
    for (const auto& z : dense.values)
      if (std::abs(z) > 0.7) ++row.outside_07;
    row.chain = row.converged && row.ess_bound < 0.7 && std::abs(value) > 0.75 && value.real() < 0 &&
                std::abs(value.imag()) < 1e-10;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "delta,re_lambda,im_lambda,abs_lambda,gap,ess_bound,N_used,converged,outside_0.7\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%d,%zu\n", r.delta, r.lambda.real(),
                  r.lambda.imag(), std::abs(r.lambda), r.gap, r.ess_bound, r.N_used, r.converged ? 1 : 0,
                  r.outside_07);
    os << buf;
  }
}

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw std::runtime_error("truncated mode dump");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

constexpr char kMagic[8] = {'P', 'F', 'C', 'M', 'O', 'D', 'E', 'S'};

}  // namespace

void write_mode_dump(std::ostream& os, double delta, Complex target, const std::vector<Complex>& c) {
  os.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(os, 1);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.size()));
  put_le<double>(os, delta);
  put_le<double>(os, target.real());
  put_le<double>(os, target.imag());
  for (const auto& z : c) {
    put_le<double>(os, z.real());
    put_le<double>(os, z.imag());
  }
}

std::vector<Complex> read_mode_dump(std::istream& is, double* delta, Complex* target) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("not a mode dump");
  if (get_le<std::uint32_t>(is) != 1) throw std::runtime_error("unsupported mode dump version");
  auto n = get_le<std::uint32_t>(is);
  double d = get_le<double>(is);
  double re = get_le<double>(is);
  double im = get_le<double>(is);
  if (delta) *delta = d;
  if (target) *target = Complex(re, im);
  std::vector<Complex> c;
  c.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    double a = get_le<double>(is);
    double b = get_le<double>(is);
    c.emplace_back(a, b);
  }
  return c;
}

}  // namespace pfc
