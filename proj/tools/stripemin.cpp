// Command line front end. Parses flags, layers them over an optional config
// file and hands the result to stripemin::run.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stripemin/driver.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> lambda;
  std::optional<std::string> out;
  std::optional<long long> seed;
  std::optional<double> h;
  std::optional<double> tmax;
  std::optional<double> period;
  std::optional<int> cases;
  std::vector<std::string> overrides;  // section.key=value
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->set_help_flag("--help", "Print this help message and exit");
  cmd->add_option("--config", f.config, "Config file (key = value with [section] headers)");
  cmd->add_option("--lambda", f.lambda, "Comma-separated coupling list");
  cmd->add_option("--out", f.out, "Output CSV path ('-' for stdout)");
  cmd->add_option("--seed", f.seed, "Seed for verification campaigns and random restarts");
  cmd->add_option("--h", f.h, "Largest grid spacing");
  cmd->add_option("--tmax", f.tmax, "Largest half-period in the scan");
  cmd->add_option("--set", f.overrides, "Override any config key, e.g. --set solver.tolerance=1e-10");
}

stripemin::RunConfig build_config(const Flags& f, stripemin::RunMode mode) {
  stripemin::RunConfig c;
  if (!f.config.empty()) stripemin::load_config_file(c, f.config);
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw stripemin::ConfigError("--set expects section.key=value, got '" + kv + "'");
    stripemin::apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.lambda) stripemin::apply_setting(c, "run.lambda", *f.lambda);
  if (f.out) c.out = *f.out;
  if (f.seed) c.seed = static_cast<unsigned long long>(*f.seed);
  if (f.h) c.solver.max_spacing = *f.h;
  if (f.tmax) c.solver.t_max = *f.tmax;
  if (f.period) c.point_period = *f.period;
  if (f.cases) c.cases = *f.cases;
  c.mode = mode;
  c.solver.seed = c.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic and constant minimizers of a one-dimensional nonlocal energy"};
  app.require_subcommand(1);
  // "--h" is the grid spacing, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  Flags flags;

  auto* sweep = app.add_subcommand("sweep", "Classify each coupling as constant or periodic");
  auto* point = app.add_subcommand("point", "Minimize at one coupling and write the profile");
  auto* exact = app.add_subcommand("exact", "Closed-form table for the exponential kernel");
  auto* verify = app.add_subcommand("verify", "Randomized reflection-positivity and chessboard checks");
  for (auto* cmd : {sweep, point, exact, verify}) add_common(cmd, flags);
  point->add_option("--T", flags.period, "Half-period; omitted means the outer minimizer picks it");
  verify->add_option("--cases", flags.cases, "Number of randomized cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return stripemin::kExitConfigError;
  }

  stripemin::RunMode mode = stripemin::RunMode::phase_sweep;
  if (point->parsed()) mode = stripemin::RunMode::single_point;
  if (exact->parsed()) mode = stripemin::RunMode::exact_example;
  if (verify->parsed()) mode = stripemin::RunMode::verify_rp;

  stripemin::RunConfig config;
  try {
    config = build_config(flags, mode);
  } catch (const stripemin::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return stripemin::kExitConfigError;
  }

  // Rows are buffered so a failed run never leaves a truncated file behind.
  std::ostringstream buffer;
  int status = stripemin::kExitOk;
  try {
    status = stripemin::run(config, buffer, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stripemin::kExitInvariantFailure;
  }
  if (status == stripemin::kExitConfigError) return status;

  if (config.out.empty() || config.out == "-") {
    std::cout << buffer.str();
  } else {
    std::ofstream file(config.out, std::ios::binary);
    file << buffer.str();
    if (!file) {
      std::cerr << "error: cannot write '" << config.out << "'\n";
      return stripemin::kExitConfigError;
    }
  }
  return status;
}
