#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pfc/bvlab.hpp"
#include "pfc/circlemap.hpp"
#include "pfc/mollifier.hpp"
#include "pfc/spectra.hpp"
#include "pfc/steptransfer.hpp"

namespace pfc::cli {

namespace {

using nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  json map = "keller_rugh";
  std::optional<double> delta;
  std::optional<std::string> delta_sweep;
  std::optional<long> N;
  std::string kappa = "7/10";
  double newton_tol = 1e-14;
  double tail_cutoff = 12.0;
  std::uint64_t seed = 13;
  int k_max = 10;
  long n_cap = 8193;
  std::optional<std::string> target;
  std::string out;
  std::string format = "json";
};

const char* const kConfigKeys[] = {"map",         "delta", "delta_sweep", "N",      "kappa", "newton_tol",
                                   "tail_cutoff", "seed",  "k_max",       "n_cap",  "target", "out",
                                   "format"};

template <class T>
T config_value(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config key '") + key + "': " + e.what());
  }
}

void load_config(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kConfigKeys) known = known || key == k;
    if (!known) throw InputError("unknown config key '" + key + "'");
  }
  if (j.contains("map")) c.map = j["map"];
  if (j.contains("delta")) c.delta = config_value<double>(j, "delta");
  if (j.contains("delta_sweep")) c.delta_sweep = config_value<std::string>(j, "delta_sweep");
  if (j.contains("N")) c.N = config_value<long>(j, "N");
  if (j.contains("kappa")) {
    c.kappa = j["kappa"].is_string() ? j["kappa"].get<std::string>() : j["kappa"].dump();
  }
  if (j.contains("newton_tol")) c.newton_tol = config_value<double>(j, "newton_tol");
  if (j.contains("tail_cutoff")) c.tail_cutoff = config_value<double>(j, "tail_cutoff");
  if (j.contains("seed")) c.seed = config_value<std::uint64_t>(j, "seed");
  if (j.contains("k_max")) c.k_max = config_value<int>(j, "k_max");
  if (j.contains("n_cap")) c.n_cap = config_value<long>(j, "n_cap");
  if (j.contains("target")) c.target = config_value<std::string>(j, "target");
  if (j.contains("out")) c.out = config_value<std::string>(j, "out");
  if (j.contains("format")) c.format = config_value<std::string>(j, "format");
}

PiecewiseLinearLift resolve_map(const json& source) {
  if (source.is_string()) {
    const std::string name = source.get<std::string>();
    if (name == "keller_rugh") return keller_rugh();
    if (name == "doubling") return doubling_map();
    std::ifstream in(name);
    if (!in) throw InputError("map '" + name + "' is neither a built-in name nor a readable file");
    try {
      return lift_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
      throw InputError("map file " + name + ": " + e.what());
    }
  }
  if (source.is_object()) return lift_from_json(source);
  throw InputError("map must be a name, a path or a lift object");
}

bool same_lift(const PiecewiseLinearLift& a, const PiecewiseLinearLift& b) {
  return a.period() == b.period() && a.breaks() == b.breaks() && a.slopes() == b.slopes();
}

MollifierOptions mollifier_options(const RunConfig& c) {
  if (!(c.newton_tol > 0)) throw InputError("newton-tol must be positive");
  if (!(c.tail_cutoff > 0)) throw InputError("tail-cutoff must be positive");
  MollifierOptions o;
  o.newton_tol = c.newton_tol;
  o.tail_cutoff = c.tail_cutoff;
  return o;
}

std::size_t grid_size(const RunConfig& c, long fallback) {
  long n = c.N.value_or(fallback);
  if (n < 33 || n % 2 == 0) throw InputError("N must be odd and at least 33");
  return static_cast<std::size_t>(n);
}

double positive_delta(const RunConfig& c, double fallback) {
  double d = c.delta.value_or(fallback);
  if (!(d > 0) || !std::isfinite(d)) throw InputError("delta must be positive");
  return d;
}

std::vector<double> parse_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw InputError("delta-sweep must look like lo:hi:steps");
  double lo = 0, hi = 0;
  long steps = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    steps = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
  } catch (const std::exception&) {
    throw InputError("delta-sweep must look like lo:hi:steps");
  }
  if (!(lo > 0) || !(hi >= lo) || steps < 1) throw InputError("delta-sweep needs 0 < lo <= hi and steps >= 1");
  if (steps == 1) {
    if (lo != hi) throw InputError("a one-step delta-sweep needs lo = hi");
    return {hi};
  }
  std::vector<double> out;
  const double a = std::log10(hi), b = std::log10(lo);
  for (long i = 0; i < steps; ++i) out.push_back(std::pow(10.0, a + (b - a) * static_cast<double>(i) / (steps - 1)));
  return out;
}

Complex parse_complex(const std::string& text) {
  std::stringstream ss(text);
  double re = 0, im = 0;
  char comma = 0;
  if (!(ss >> re)) throw InputError("target must be 're' or 're,im'");
  if (ss >> comma) {
    if (comma != ',' || !(ss >> im)) throw InputError("target must be 're' or 're,im'");
  }
  std::string rest;
  if (ss >> rest) throw InputError("target must be 're' or 're,im'");
  return {re, im};
}

void require_format(const RunConfig& c, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (c.format == f) return;
  throw InputError("format '" + c.format + "' is not available for this command");
}

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// The values printed for the twelve-piece example map.
struct Reference {
  SquareMatrix<Rational> matrix;
  std::string factorization;
  std::vector<std::string> eigenvalues;
  std::vector<QuadSurd> v2;
};

Reference twelve_piece_reference() {
  Reference r;
  const long rows[6][6][2] = {{{2, 3}, {1, 3}, {0, 1}, {0, 1}, {0, 1}, {0, 1}},
                              {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {0, 1}, {0, 1}},
                              {{0, 1}, {0, 1}, {0, 1}, {0, 1}, {2, 3}, {1, 3}},
                              {{1, 3}, {2, 3}, {0, 1}, {0, 1}, {0, 1}, {0, 1}},
                              {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {0, 1}, {0, 1}},
                              {{0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 3}, {2, 3}}};
  r.matrix = SquareMatrix<Rational>(6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) r.matrix(i, j) = make_rational(rows[i][j][0], rows[i][j][1]);
  r.factorization = "x^2*(x-1)*(x-2/3)*(x^2+1/3*x-1/3)";
  r.eigenvalues = {"1", "(-1-sqrt(13))/6", "2/3", "(-1+sqrt(13))/6", "0", "0"};
  const QuadSurd a(make_rational(3, 2), make_rational(1, 2), 13);
  const QuadSurd b(make_rational(-5, 2), make_rational(-1, 2), 13);
  r.v2 = {QuadSurd(1), a, b, b, a, QuadSurd(1)};
  return r;
}

struct Emitter {
  const RunConfig& config;
  std::ostream& out;

  void write(const std::function<void(std::ostream&)>& body, bool binary = false) const {
    if (config.out.empty()) {
      body(out);
      return;
    }
    std::ofstream file(config.out, binary ? std::ios::binary : std::ios::out);
    if (!file) throw InputError("cannot write " + config.out);
    body(file);
  }
  void json_out(const json& j) const {
    write([&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }
};

int cmd_matrix(const RunConfig& c, const Emitter& emit) {
  require_format(c, {"json", "csv"});
  PiecewiseLinearLift lift = resolve_map(c.map);
  MarkovReport markov = markov_check(lift);
  if (!markov.markov) throw NonMarkovError("map is not Markov on any grid 1/q with q <= 64");
  TransitionMatrix tm = transition_matrix(lift, markov.q);
  CharPoly cp = char_poly(tm.entries);
  std::string factorization = factorization_string(factor_rational(cp));
  std::vector<Eigenvalue> eigs = eigenvalues(tm.entries);
  std::optional<StepEigenpair> sub = subdominant_step_eigenfunction(lift);
  std::vector<QuadSurd> v2;
  if (sub) v2 = left_eigenvector(tm.entries, sub->value);

  std::vector<std::string> listed;
  for (const auto& e : eigs)
    for (int k = 0; k < e.multiplicity; ++k) listed.push_back(e.exact ? e.exact_string() : std::string("numeric"));

  const bool is_reference = same_lift(lift, keller_rugh());
  bool reproduced = true;
  if (is_reference) {
    Reference ref = twelve_piece_reference();
    reproduced = tm.entries == ref.matrix && factorization == ref.factorization && listed == ref.eigenvalues &&
                 v2 == ref.v2;
  }

  if (c.format == "csv") {
    emit.write([&](std::ostream& os) { write_matrix_csv(os, tm.entries); });
  } else {
    json j;
    j["schema"] = "1";
    j["command"] = "matrix";
    j["map"] = lift_to_json(lift);
    j["q"] = tm.q;
    j["matrix"] = json::array();
    for (std::size_t i = 0; i < tm.entries.size(); ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < tm.entries.size(); ++k) row.push_back(to_string(tm.entries(i, k)));
      j["matrix"].push_back(row);
    }
    j["char_poly"] = cp.to_string();
    j["factorization"] = factorization;
    j["eigenvalues"] = spectrum_json(eigs)["eigenvalues"];
    if (sub) {
      json vec = json::array();
      for (const auto& x : v2) vec.push_back(x.to_string());
      j["v2"] = {{"eigenvalue", sub->value.to_string()}, {"vector", vec}};
    } else {
      j["v2"] = nullptr;
    }
    j["reference"] = is_reference ? "twelve-piece example" : "none";
    j["reproduced"] = reproduced;
    emit.json_out(j);
  }
  return reproduced ? kPass : kAssertion;
}

int cmd_ly(const RunConfig& c, const Emitter& emit) {
  require_format(c, {"json", "csv"});
  PiecewiseLinearLift lift = resolve_map(c.map);
  Rational kappa;
  try {
    kappa = parse_rational(c.kappa);
  } catch (const std::invalid_argument&) {
    throw InputError("kappa '" + c.kappa + "' is not a number");
  }
  LYConstants constants = ly_constants(lift, kappa);

  const int functions = 50, n_max = 2 * constants.M;
  std::mt19937_64 rng(c.seed);
  long checks = 0, violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < functions; ++i) {
    JumpPLFunction<Rational> f = random_jump_function(rng);
    for (const auto& r : check_ly_orbit(lift, f, n_max, constants)) {
      ++checks;
      if (!r.holds) ++violations;
      if (r.rhs > 0) min_slack = std::min(min_slack, r.slack / r.rhs);
    }
  }
  json named = json::object();
  auto run_named = [&](const std::string& name, const JumpPLFunction<QuadSurd>& f) {
    json rows = json::array();
    for (const auto& r : check_ly_orbit(lift, f, 10, constants)) {
      ++checks;
      if (!r.holds) ++violations;
      rows.push_back(ly_check_json(r));
    }
    named[name] = rows;
  };
  run_named("one", JumpPLFunction<QuadSurd>::constant(QuadSurd(1)));
  if (auto sub = subdominant_step_eigenfunction(lift)) run_named("step_eigenfunction", sub->function);

  if (c.format == "csv") {
    emit.write([&](std::ostream& os) {
      os << "N,sup_g,D,atoms\n";
      for (std::size_t i = 0; i < constants.D_list.size(); ++i)
        os << i + 1 << ',' << to_string(constants.sup_g[i]) << ',' << to_string(constants.D_list[i]) << ','
           << constants.atoms[i] << '\n';
    });
  } else {
    json j;
    j["schema"] = "1";
    j["command"] = "ly";
    j["seed"] = c.seed;
    j["constants"] = ly_constants_json(constants);
    j["suite"] = {{"random_functions", functions},
                  {"n_max", n_max},
                  {"checks", checks},
                  {"violations", violations},
                  {"min_relative_slack", min_slack}};
    j["orbits"] = named;
    emit.json_out(j);
  }
  return violations == 0 ? kPass : kAssertion;
}

bool chain_holds(const SpectrumReport& r) {
  return r.converged && r.ess_radius_bound < 0.7 && std::abs(r.lambda_delta) > 0.75;
}

int cmd_spectrum(const RunConfig& c, const Emitter& emit) {
  require_format(c, {"json", "csv"});
  PiecewiseLinearLift lift = resolve_map(c.map);
  const double delta = positive_delta(c, 0.01);
  const std::size_t N = grid_size(c, 513);
  if (c.k_max < 1) throw InputError("k-max must be at least 1");
  MollifiedLift m(lift, delta, mollifier_options(c));
  SpectrumOptions opt;
  opt.k_max = c.k_max;
  SpectrumReport r = leading_spectrum(m, N, opt);
  const bool chain = chain_holds(r);

  if (c.format == "csv") {
    emit.write([&](std::ostream& os) {
      os << "index,re,im,abs,residual,converged\n";
      os.precision(17);
      for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        const auto& e = r.eigenvalues[i];
        os << i << ',' << e.value.real() << ',' << e.value.imag() << ',' << std::abs(e.value) << ',' << e.residual
           << ',' << (e.converged ? 1 : 0) << '\n';
      }
    });
  } else {
    json j = spectrum_report_json(r);
    j["command"] = "spectrum";
    j["chain"] = chain;
    emit.json_out(j);
  }
  if (!r.converged) return kNonConvergence;
  return chain ? kPass : kAssertion;
}

int cmd_sweep(const RunConfig& c, const Emitter& emit) {
  require_format(c, {"json", "csv"});
  PiecewiseLinearLift lift = resolve_map(c.map);
  std::vector<double> deltas = c.delta_sweep ? parse_sweep(*c.delta_sweep) : default_deltas();
  SweepOptions opt;
  opt.N0 = grid_size(c, 513);
  if (c.n_cap < static_cast<long>(opt.N0)) throw InputError("n-cap must be at least N");
  opt.n_cap = static_cast<std::size_t>(c.n_cap);
  if (c.k_max < 1) throw InputError("k-max must be at least 1");
  opt.k_max = c.k_max;
  opt.mollifier = mollifier_options(c);
  std::vector<SweepRow> rows = delta_sweep(lift, deltas, opt);

  bool any_chain = false, all_converged = true;
  for (const auto& row : rows) {
    any_chain = any_chain || row.chain;
    all_converged = all_converged && row.converged;
  }
  if (c.format == "csv") {
    emit.write([&](std::ostream& os) { write_sweep_csv(os, rows); });
  } else {
    json j;
    j["schema"] = "1";
    j["command"] = "sweep";
    j["N0"] = opt.N0;
    j["n_cap"] = opt.n_cap;
    j["rows"] = json::array();
    for (const auto& row : rows) {
      j["rows"].push_back({{"delta", row.delta},
                           {"lambda", complex_json(row.lambda)},
                           {"abs_lambda", std::abs(row.lambda)},
                           {"gap_to_lambda2", row.gap},
                           {"ess_radius_bound", row.ess_bound},
                           {"N_used", row.N_used},
                           {"converged", row.converged},
                           {"refine_diff", row.refine_diff},
                           {"outside_0.7", row.outside_07},
                           {"chain", row.chain}});
    }
    j["chain_found"] = any_chain;
    emit.json_out(j);
  }
  if (any_chain) return kPass;
  return all_converged ? kAssertion : kNonConvergence;
}

int cmd_approx(const RunConfig& c, const Emitter& emit) {
  require_format(c, {"json", "csv"});
  PiecewiseLinearLift lift = resolve_map(c.map);
  const double delta = c.delta.value_or(0.01);
  if (!(delta > 0 && delta < 1)) throw InputError("approx needs delta in (0, 1)");
  MollifiedLift m(lift, delta, mollifier_options(c));
  C0Estimate c0 = estimate_c0(m);
  struct Row {
    std::string name;
    ApproxBound b;
  };
  std::vector<Row> rows;
  bool all = true;
  for (const auto& nf : function_battery(lift, c.seed)) {
    rows.push_back({nf.name, approx_bound_check(m, c0, nf.f)});
    all = all && rows.back().b.holds();
  }
  if (c.format == "csv") {
    emit.write([&](std::ostream& os) {
      os.precision(17);
      os << "function,lhs,rhs,c0_est,bv_norm,holds\n";
      for (const auto& r : rows)
        os << r.name << ',' << r.b.lhs << ',' << r.b.rhs << ',' << r.b.c0_est << ',' << r.b.bv_norm << ','
           << (r.b.holds() ? 1 : 0) << '\n';
    });
  } else {
    json j;
    j["schema"] = "1";
    j["command"] = "approx";
    j["delta"] = delta;
    j["seed"] = c.seed;
    j["c0"] = {{"inverse", c0.inverse}, {"derivative", c0.derivative}, {"estimate", c0.value()}};
    j["rows"] = json::array();
    for (const auto& r : rows)
      j["rows"].push_back(
          {{"function", r.name}, {"lhs", r.b.lhs}, {"rhs", r.b.rhs}, {"bv_norm", r.b.bv_norm}, {"holds", r.b.holds()}});
    j["all_hold"] = all;
    emit.json_out(j);
  }
  return all ? kPass : kAssertion;
}

int cmd_eigenfunction(const RunConfig& c, const Emitter& emit) {
  require_format(c, {"json", "csv", "bin"});
  if (c.format == "bin" && c.out.empty()) throw InputError("binary output needs --out");
  PiecewiseLinearLift lift = resolve_map(c.map);
  const double delta = positive_delta(c, 0.01);
  const std::size_t N = grid_size(c, 513);
  MollifiedLift m(lift, delta, mollifier_options(c));
  SpectralOperator op = assemble(m, N);
  Complex target;
  if (c.target) {
    target = parse_complex(*c.target);
  } else {
    DenseEigenResult eig = eig_dense(op.A, false);
    target = eig.values[identify_lambda(eig.values)];
  }
  Eigenfunction e = eigenfunction(op, target);
  std::optional<DecayFit> fit;
  try {
    fit = decay_rate(e.coefficients);
  } catch (const std::invalid_argument&) {
  }

  if (c.format == "bin") {
    emit.write([&](std::ostream& os) { write_mode_dump(os, delta, e.value, e.coefficients); }, true);
  } else if (c.format == "csv") {
    emit.write([&](std::ostream& os) {
      os.precision(17);
      os << "mode,re,im,abs\n";
      for (long k = -op.K; k <= op.K; ++k) {
        Complex z = e.coefficients[op.index(k)];
        os << k << ',' << z.real() << ',' << z.imag() << ',' << std::abs(z) << '\n';
      }
    });
  } else {
    json j;
    j["schema"] = "1";
    j["command"] = "eigenfunction";
    j["delta"] = delta;
    j["N"] = N;
    j["target"] = complex_json(target);
    j["value"] = complex_json(e.value);
    j["residual"] = e.residual;
    if (fit) {
      j["decay"] = {{"rho_hat", fit->rho_hat},
                    {"fit_r2", fit->fit_r2},
                    {"modes", fit->modes},
                    {"envelope_rho", fit->envelope_rho},
                    {"envelope_r2", fit->envelope_r2}};
    } else {
      j["decay"] = nullptr;
    }
    j["coefficients"] = json::array();
    for (long k = -op.K; k <= op.K; ++k) {
      Complex z = e.coefficients[op.index(k)];
      j["coefficients"].push_back({k, z.real(), z.imag()});
    }
    emit.json_out(j);
  }
  return kPass;
}

int cmd_map_info(const RunConfig& c, const Emitter& emit) {
  require_format(c, {"json", "csv"});
  PiecewiseLinearLift lift = resolve_map(c.map);
  if (c.k_max < 1 || c.k_max > 16) throw InputError("k-max must lie in 1..16 for map-info");
  std::vector<DerivativeBound> bounds;
  for (int k = 1; k <= c.k_max; ++k) bounds.push_back(derivative_inf(lift, k));

  if (c.format == "csv") {
    emit.write([&](std::ostream& os) {
      os.precision(17);
      os << "k,inf_derivative,theta\n";
      for (std::size_t i = 0; i < bounds.size(); ++i)
        os << i + 1 << ',' << to_string(bounds[i].inf_derivative) << ',' << bounds[i].theta << '\n';
    });
    return kPass;
  }
  auto strings = [](const std::vector<Rational>& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(to_string(x));
    return a;
  };
  MarkovReport markov = markov_check(lift);
  json j;
  j["schema"] = "1";
  j["command"] = "map-info";
  j["lift"] = lift_to_json(lift);
  j["pieces"] = lift.slopes().size();
  j["min_slope"] = to_string(lift.min_slope());
  j["max_slope"] = to_string(lift.max_slope());
  j["singular_set"] = strings(singular_set(lift));
  j["critical_images"] = strings(critical_images(lift));
  j["markov"] = {{"markov", markov.markov}, {"q", markov.q}};
  j["expansion"] = json::array();
  for (std::size_t i = 0; i < bounds.size(); ++i)
    j["expansion"].push_back(
        {{"k", i + 1}, {"inf_derivative", to_string(bounds[i].inf_derivative)}, {"theta", bounds[i].theta}});
  emit.json_out(j);
  return kPass;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transfer operators of piecewise-linear expanding circle maps"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, out, format, map, kappa, delta_sweep, target;
    double delta = 0, newton_tol = 0, tail_cutoff = 0;
    long N = 0, n_cap = 0;
    std::uint64_t seed = 0;
    int k_max = 0;
  } flags;

  auto common = [&](CLI::App* sub, bool with_format = true) {
    sub->add_option("--config", flags.config, "JSON run configuration; flags override its values");
    sub->add_option("--out", flags.out, "write results to this file instead of stdout");
    if (with_format) sub->add_option("--format", flags.format, "json (default) or csv");
    sub->add_option("--map", flags.map, "keller_rugh (default), doubling, or a lift JSON file");
  };
  auto mollifier = [&](CLI::App* sub) {
    sub->add_option("--newton-tol", flags.newton_tol, "Newton tolerance for tau_delta^-1 (1e-14)");
    sub->add_option("--tail-cutoff", flags.tail_cutoff, "Gaussian tail cutoff in units of delta (12)");
  };

  CLI::App* matrix = app.add_subcommand("matrix", "transition matrix, characteristic polynomial, eigenvectors");
  common(matrix);
  CLI::App* ly = app.add_subcommand("ly", "Lasota-Yorke constants and the exact inequality suite");
  common(ly);
  ly->add_option("--kappa", flags.kappa, "contraction rate, a fraction or decimal (0.7)");
  ly->add_option("--seed", flags.seed, "seed of the random test functions (13)");
  CLI::App* spectrum = app.add_subcommand("spectrum", "leading spectrum of the mollified operator");
  common(spectrum);
  mollifier(spectrum);
  spectrum->add_option("--delta", flags.delta, "mollifier width (0.01)");
  spectrum->add_option("--N", flags.N, "odd collocation grid size (513)");
  spectrum->add_option("--k-max", flags.k_max, "iterates used for the essential radius bound (10)");
  CLI::App* sweep = app.add_subcommand("sweep", "track lambda_delta over a range of widths");
  common(sweep);
  mollifier(sweep);
  sweep->add_option("--delta-sweep", flags.delta_sweep, "lo:hi:steps, log-spaced (1e-3:1e-1:5)");
  sweep->add_option("--N", flags.N, "starting grid size (513)");
  sweep->add_option("--n-cap", flags.n_cap, "largest grid size tried (8193)");
  sweep->add_option("--k-max", flags.k_max, "iterates used for the essential radius bound (10)");
  CLI::App* approx = app.add_subcommand("approx", "L1 distance between the mollified and exact operators");
  common(approx);
  mollifier(approx);
  approx->add_option("--delta", flags.delta, "mollifier width in (0, 1) (0.01)");
  approx->add_option("--seed", flags.seed, "seed of the random test functions (13)");
  CLI::App* eigen = app.add_subcommand("eigenfunction", "Fourier coefficients of an eigenfunction");
  eigen->add_option("--config", flags.config, "JSON run configuration");
  eigen->add_option("--out", flags.out, "output file (required for bin)");
  eigen->add_option("--format", flags.format, "json (default), csv or bin");
  eigen->add_option("--map", flags.map, "keller_rugh (default), doubling, or a lift JSON file");
  mollifier(eigen);
  eigen->add_option("--delta", flags.delta, "mollifier width (0.01)");
  eigen->add_option("--N", flags.N, "odd collocation grid size (513)");
  eigen->add_option("--target", flags.target, "re or re,im; default the eigenvalue identified with lambda_2");
  CLI::App* info = app.add_subcommand("map-info", "lift, singular set, Markov grid and expansion rates");
  common(info);
  info->add_option("--k-max", flags.k_max, "iterates of the exact expansion bound (10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    app.exit(e, msg, err);
    err << msg.str();
    return kInvalidInput;
  }

  CLI::App* sub = app.get_subcommands().front();
  auto was_given = [&](const std::string& name) {
    CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };

  try {
    RunConfig c;
    if (was_given("--config")) load_config(flags.config, c);
    if (was_given("--out")) c.out = flags.out;
    if (was_given("--format")) c.format = flags.format;
    if (was_given("--map")) c.map = flags.map;
    if (was_given("--kappa")) c.kappa = flags.kappa;
    if (was_given("--seed")) c.seed = flags.seed;
    if (was_given("--delta")) c.delta = flags.delta;
    if (was_given("--delta-sweep")) c.delta_sweep = flags.delta_sweep;
    if (was_given("--N")) c.N = flags.N;
    if (was_given("--n-cap")) c.n_cap = flags.n_cap;
    if (was_given("--k-max")) c.k_max = flags.k_max;
    if (was_given("--newton-tol")) c.newton_tol = flags.newton_tol;
    if (was_given("--tail-cutoff")) c.tail_cutoff = flags.tail_cutoff;
    if (was_given("--target")) c.target = flags.target;

    Emitter emit{c, out};
    const std::string name = sub->get_name();
    if (name == "matrix") return cmd_matrix(c, emit);
    if (name == "ly") return cmd_ly(c, emit);
    if (name == "spectrum") return cmd_spectrum(c, emit);
    if (name == "sweep") return cmd_sweep(c, emit);
    if (name == "approx") return cmd_approx(c, emit);
    if (name == "eigenfunction") return cmd_eigenfunction(c, emit);
    return cmd_map_info(c, emit);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const IdentificationError& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    // LiftError, NonMarkovError and KappaError derive from invalid_argument
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

}  // namespace pfc::cli
