#pragma once

// Batch driver: configuration, mode dispatch and CSV emission. The command
// line front end in tools/ only parses flags and forwards here.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stripemin/energy.hpp"
#include "stripemin/exact_example.hpp"
#include "stripemin/kernel.hpp"
#include "stripemin/local_term.hpp"
#include "stripemin/minimizer.hpp"
#include "stripemin/parallel.hpp"
#include "stripemin/reflection.hpp"

namespace stripemin {

enum ExitCode : int { kExitOk = 0, kExitInvariantFailure = 1, kExitConfigError = 2 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { phase_sweep, single_point, exact_example, verify_rp };

inline std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::phase_sweep: return "sweep";
    case RunMode::single_point: return "point";
    case RunMode::exact_example: return "exact";
    case RunMode::verify_rp: return "verify";
  }
  return "?";
}

inline RunMode parse_run_mode(std::string_view s) {
  if (s == "sweep" || s == "phase_sweep") return RunMode::phase_sweep;
  if (s == "point" || s == "single_point") return RunMode::single_point;
  if (s == "exact" || s == "exact_example") return RunMode::exact_example;
  if (s == "verify" || s == "verify_rp") return RunMode::verify_rp;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

enum class VerifyChecks { lemma1, chessboard, both };

struct RunConfig {
  // kernel: explicit mixture or power-law shorthand
  double strength = 1.0;
  std::vector<double> rates{1.0};
  std::vector<double> weights{1.0};
  std::optional<double> power_exponent;
  int power_count = 40;
  double power_rate_min = 0.1;
  double power_rate_max = 10.0;

  LocalVariant variant = LocalVariant::vee;
  double beta = 1.0;

  RunMode mode = RunMode::phase_sweep;
  std::vector<double> lambdas;
  std::string out;  // empty or "-" writes to stdout
  unsigned long long seed = 42;
  unsigned threads = 0;  // 0: STRIPEMIN_THREADS or hardware

  SolverOptions solver;
  std::optional<double> point_period;

  int cases = 100;
  VerifyChecks checks = VerifyChecks::both;

  bool transition = false;
  double transition_lower = 1.0;
  double transition_upper = 3.0;
  double transition_width = 0.05;

  MixtureKernel kernel() const {
    if (power_exponent)
      return power_law_approximation(strength, *power_exponent, power_count, power_rate_min, power_rate_max);
    if (rates.size() != weights.size()) throw ConfigError("kernel.rates and kernel.weights differ in length");
    std::vector<DecayComponent> comps;
    for (std::size_t i = 0; i < rates.size(); ++i) comps.push_back({weights[i], rates[i]});
    return MixtureKernel(strength, std::move(comps));
  }

  LocalTerm local_term() const {
    switch (variant) {
      case LocalVariant::quartic: return LocalTerm::quartic();
      case LocalVariant::vee: return LocalTerm::vee();
      case LocalVariant::entropy: return LocalTerm::entropy(beta);
    }
    return LocalTerm::vee();
  }

  /// Checks the cross-field invariants; throws ConfigError.
  void validate() const {
    try {
      solver.validate();
      (void)kernel();
      (void)local_term();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (mode == RunMode::phase_sweep && lambdas.empty())
      throw ConfigError("run.lambda must list at least one coupling for sweep mode");
    if (solver.max_spacing > solver.t_min / 10.0)
      throw ConfigError("solver.h must not exceed solver.t_min / 10");
    if (cases < 1) throw ConfigError("verify.cases must be >= 1");
    if (point_period && !(*point_period > 0.0)) throw ConfigError("solver.T must be positive");
    if (transition && !(transition_lower > 0.0 && transition_upper > transition_lower && transition_width > 0.0))
      throw ConfigError("transition: need 0 < lower < upper and width > 0");
  }

  /// Canonical key=value listing of every effective setting, used for the
  /// config hash in CSV footers.
  std::string canonical() const {
    std::ostringstream os;
    auto num = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    auto list = [&](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
      return s;
    };
    os << "kernel.strength=" << num(strength) << "\n";
    if (power_exponent) {
      os << "kernel.power_exponent=" << num(*power_exponent) << "\nkernel.power_count=" << power_count
         << "\nkernel.power_rate_min=" << num(power_rate_min) << "\nkernel.power_rate_max=" << num(power_rate_max)
         << "\n";
    } else {
      os << "kernel.rates=" << list(rates) << "\nkernel.weights=" << list(weights) << "\n";
    }
    os << "local.variant=" << to_string(variant) << "\n";
    if (variant == LocalVariant::entropy) os << "local.beta=" << num(beta) << "\n";
    os << "run.mode=" << to_string(mode) << "\nrun.lambda=" << list(lambdas) << "\nrun.seed=" << seed << "\n";
    os << "solver.t_min=" << num(solver.t_min) << "\nsolver.t_max=" << num(solver.t_max)
       << "\nsolver.h=" << num(solver.max_spacing) << "\nsolver.tolerance=" << num(solver.tolerance)
       << "\nsolver.max_iterations=" << solver.max_iterations << "\nsolver.margin=" << num(solver.classification_margin)
       << "\nsolver.scan_points=" << solver.scan_points << "\nsolver.random_restarts=" << solver.random_restarts
       << "\n";
    if (point_period) os << "solver.T=" << num(*point_period) << "\n";
    os << "verify.cases=" << cases << "\nverify.check="
       << (checks == VerifyChecks::lemma1 ? "lemma1" : checks == VerifyChecks::chessboard ? "chessboard" : "both")
       << "\n";
    if (transition)
      os << "transition.lower=" << num(transition_lower) << "\ntransition.upper=" << num(transition_upper)
         << "\ntransition.width=" << num(transition_width) << "\n";
    return os.str();
  }
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// Flat "key = value" text with [section] headers; '#' and ';' start
/// comments. Keys are returned as "section.key"; keys before any header
/// belong to "run".
inline std::map<std::string, ConfigEntry> parse_config_text(std::istream& in, const std::string& source) {
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::map<std::string, ConfigEntry> entries;
  std::string section = "run", raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find_first_of("#;");
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(source + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    const std::string full = section + "." + key;
    if (entries.count(full))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + full + "' (first on line " +
                        std::to_string(entries[full].line) + ")");
    entries[full] = {trim(line.substr(eq + 1)), lineno};
  }
  return entries;
}

namespace detail {

inline double parse_real(const std::string& field, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field '" + field + "': expected a real number, got '" + s + "'");
  }
}

inline long long parse_integer(const std::string& field, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field '" + field + "': expected an integer, got '" + s + "'");
  }
}

inline bool parse_bool(const std::string& field, const std::string& s) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError("field '" + field + "': expected true/false, got '" + s + "'");
}

inline std::vector<double> parse_real_list(const std::string& field, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("field '" + field + "': empty list element");
    out.push_back(parse_real(field, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("field '" + field + "': empty list");
  return out;
}

}  // namespace detail

/// Applies one "section.key" setting to the config. Throws ConfigError with
/// the field name on unknown keys or malformed values.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "kernel.strength") c.strength = parse_real(key, value);
  else if (key == "kernel.rates") c.rates = parse_real_list(key, value);
  else if (key == "kernel.weights") c.weights = parse_real_list(key, value);
  else if (key == "kernel.power_exponent") c.power_exponent = parse_real(key, value);
  else if (key == "kernel.power_count") c.power_count = static_cast<int>(parse_integer(key, value));
  else if (key == "kernel.power_rate_min") c.power_rate_min = parse_real(key, value);
  else if (key == "kernel.power_rate_max") c.power_rate_max = parse_real(key, value);
  else if (key == "local.variant") {
    try {
      c.variant = parse_local_variant(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("field '" + key + "': " + e.what());
    }
  } else if (key == "local.beta") c.beta = parse_real(key, value);
  else if (key == "run.mode") {
    try {
      c.mode = parse_run_mode(value);
    } catch (const ConfigError& e) {
      throw ConfigError("field '" + key + "': " + e.what());
    }
  } else if (key == "run.lambda") c.lambdas = parse_real_list(key, value);
  else if (key == "run.out") c.out = value;
  else if (key == "run.seed") c.seed = static_cast<unsigned long long>(parse_integer(key, value));
  else if (key == "run.threads") c.threads = static_cast<unsigned>(parse_integer(key, value));
  else if (key == "solver.t_min") c.solver.t_min = parse_real(key, value);
  else if (key == "solver.t_max") c.solver.t_max = parse_real(key, value);
  else if (key == "solver.h") c.solver.max_spacing = parse_real(key, value);
  else if (key == "solver.tolerance") c.solver.tolerance = parse_real(key, value);
  else if (key == "solver.max_iterations") c.solver.max_iterations = static_cast<int>(parse_integer(key, value));
  else if (key == "solver.margin") c.solver.classification_margin = parse_real(key, value);
  else if (key == "solver.scan_points") c.solver.scan_points = static_cast<int>(parse_integer(key, value));
  else if (key == "solver.random_restarts") c.solver.random_restarts = static_cast<int>(parse_integer(key, value));
  else if (key == "solver.T") c.point_period = parse_real(key, value);
  else if (key == "verify.cases") c.cases = static_cast<int>(parse_integer(key, value));
  else if (key == "verify.check") {
    if (value == "lemma1") c.checks = VerifyChecks::lemma1;
    else if (value == "chessboard") c.checks = VerifyChecks::chessboard;
    else if (value == "both") c.checks = VerifyChecks::both;
    else throw ConfigError("field '" + key + "': expected lemma1, chessboard or both, got '" + value + "'");
  } else if (key == "transition.enabled") c.transition = parse_bool(key, value);
  else if (key == "transition.lower") c.transition_lower = parse_real(key, value);
  else if (key == "transition.upper") c.transition_upper = parse_real(key, value);
  else if (key == "transition.width") c.transition_width = parse_real(key, value);
  else throw ConfigError("unknown field '" + key + "'");
}

inline void apply_config(RunConfig& c, const std::map<std::string, ConfigEntry>& entries,
                         const std::string& source) {
  for (const auto& [key, entry] : entries) {
    try {
      apply_setting(c, key, entry.value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(entry.line) + ": " + e.what());
    }
  }
}

inline void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  apply_config(c, parse_config_text(in, path), path);
}

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string csv_footer(const RunConfig& c) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a(c.canonical()));
  std::ostringstream os;
  os << "# config_hash=" << hash << " tolerance=" << fmt9(c.solver.tolerance)
     << " margin=" << fmt9(c.solver.classification_margin) << " h=" << fmt9(c.solver.max_spacing) << "\n";
  return os.str();
}

inline int run_phase_sweep(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto kernel = c.kernel();
  const auto term = c.local_term();
  const unsigned workers = c.threads ? c.threads : worker_count_from_env();
  std::vector<PhasePoint> pts;
  int status = kExitOk;
  try {
    pts = phase_sweep(kernel, term, c.lambdas, c.solver, workers);
  } catch (const SweepError& e) {
    log << "error: " << e.what() << "\n";
    pts = e.points;
    status = kExitInvariantFailure;
  }
  out << "lambda,T_star,e0,e_const,regime,pg_norm,iters\n";
  for (const auto& p : pts) {
    out << fmt9(p.coupling) << "," << (p.optimal_half_period ? fmt9(*p.optimal_half_period) : "nan") << ","
        << fmt9(p.minimum_energy) << "," << fmt9(p.constant_energy) << "," << to_string(p.regime) << ","
        << fmt9(p.projected_gradient_norm) << "," << p.iterations << "\n";
    if (p.near_threshold) log << "note: lambda=" << fmt9(p.coupling) << " lies within the classification margin\n";
  }
  if (status == kExitOk && term.variant() == LocalVariant::vee && !regimes_monotone(pts)) {
    log << "error: regime flag is not monotone along the sweep\n";
    status = kExitInvariantFailure;
  }
  if (c.transition) {
    try {
      const auto br = locate_transition(kernel, term, c.transition_lower, c.transition_upper,
                                        c.transition_width, c.solver);
      out << "# transition_bracket=" << fmt9(br.constant_side) << "," << fmt9(br.periodic_side) << "\n";
    } catch (const std::exception& e) {
      log << "error: " << e.what() << "\n";
      status = kExitInvariantFailure;
    }
  }
  out << csv_footer(c);
  return status;
}

inline int run_single_point(const RunConfig& c, std::ostream& out, std::ostream& log) {
  if (c.lambdas.size() > 1) log << "note: point mode uses the first coupling only\n";
  const auto kernel = c.lambdas.empty() ? c.kernel() : c.kernel().with_strength(c.lambdas.front());
  const auto term = c.local_term();
  double T = 0.0;
  if (c.point_period) {
    T = *c.point_period;
  } else {
    const auto pt = outer_minimize(kernel, term, c.solver);
    T = pt.best_half_period;
    log << "selected T=" << fmt9(T) << " (" << to_string(pt.regime) << ")\n";
  }
  const std::size_t n = grid_size_for(T, c.solver.max_spacing);
  const auto rep = inner_minimize(T, n, kernel, term, c.solver);
  const double el = euler_lagrange_residual(rep.profile, kernel, term);

  out << "x,f\n";
  out << fmt9(0.0) << "," << fmt9(0.0) << "\n";
  for (std::size_t i = 0; i < n; ++i) out << fmt9(rep.profile.node(i)) << "," << fmt9(rep.profile[i]) << "\n";
  out << fmt9(T) << "," << fmt9(0.0) << "\n";
  out << "# lambda=" << fmt9(kernel.strength()) << " T=" << fmt9(T) << " n=" << n << "\n";
  out << "# kinetic=" << fmt9(rep.energy.kinetic) << " local=" << fmt9(rep.energy.local)
      << " interaction=" << fmt9(rep.energy.interaction) << " total=" << fmt9(rep.energy.total) << "\n";
  out << "# el_residual=" << fmt9(el) << " pg_norm=" << fmt9(rep.projected_gradient_norm)
      << " iters=" << rep.iterations << " converged=" << (rep.converged ? "true" : "false") << "\n";
  out << csv_footer(c);
  if (!rep.converged) {
    log << "error: inner solve did not converge\n";
    return kExitInvariantFailure;
  }
  return kExitOk;
}

inline int run_exact_example(const RunConfig& c, std::ostream& out, std::ostream&) {
  std::vector<double> lambdas = c.lambdas;
  if (lambdas.empty())
    for (int k = 1; k <= 16; ++k) lambdas.push_back(0.25 * k);
  out << "lambda,phi0,e_const,mu1,mu2,theta,delta_E\n";
  for (double l : lambdas) {
    const auto cs = exact::constant_solution(l);
    const auto p = exact::kink_parameters(l);
    out << fmt9(l) << "," << fmt9(cs.level) << "," << fmt9(cs.specific_energy) << "," << fmt9(p.mu1) << ","
        << fmt9(p.mu2) << "," << fmt9(p.theta) << "," << fmt9(exact::energy_difference(l)) << "\n";
  }
  out << csv_footer(c);
  char buf[64];
  std::snprintf(buf, sizeof buf, "lambda_c,%.9f\n", exact::critical_lambda());
  out << buf;
  return kExitOk;
}

inline int run_verify(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto kernel = c.kernel();
  const auto term = c.local_term();
  CampaignSettings cs;
  cs.spacing = std::min(cs.spacing, c.solver.max_spacing);
  const unsigned workers = c.threads ? c.threads : worker_count_from_env();
  auto kind_of = [&](int k) {
    switch (c.checks) {
      case VerifyChecks::lemma1: return CheckKind::lemma1;
      case VerifyChecks::chessboard: return CheckKind::chessboard;
      case VerifyChecks::both: return k % 2 == 0 ? CheckKind::lemma1 : CheckKind::chessboard;
    }
    return CheckKind::lemma1;
  };
  const auto rows = parallel_map<CampaignCase>(static_cast<std::size_t>(c.cases), workers, [&](std::size_t k) {
    return run_campaign_case(c.seed + k, kind_of(static_cast<int>(k)), kernel, term, cs);
  });
  out << "seed,check,blocks,lhs,rhs,margin\n";
  int failures = 0;
  for (const auto& r : rows) {
    out << r.seed << "," << to_string(r.kind) << "," << r.blocks << "," << fmt9(r.result.lhs) << ","
        << fmt9(r.result.rhs) << "," << fmt9(r.result.margin) << "\n";
    if (!r.passed) ++failures;
  }
  out << csv_footer(c);
  if (failures) {
    log << "error: " << failures << " inequality case(s) violated the tolerance\n";
    return kExitInvariantFailure;
  }
  return kExitOk;
}

/// Dispatches on c.mode and writes CSV to `out`; diagnostics go to `log`.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& log) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  switch (c.mode) {
    case RunMode::phase_sweep: return run_phase_sweep(c, out, log);
    case RunMode::single_point: return run_single_point(c, out, log);
    case RunMode::exact_example: return run_exact_example(c, out, log);
    case RunMode::verify_rp: return run_verify(c, out, log);
  }
  return kExitConfigError;
}

}  // namespace stripemin
