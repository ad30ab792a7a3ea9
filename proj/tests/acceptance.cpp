// Acceptance gate: one PASS/FAIL line per criterion. Tolerances and runtime
// budgets are fixed here and are not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "stripemin/exact_example.hpp"
#include "stripemin/minimizer.hpp"
#include "stripemin/reflection.hpp"

using namespace stripemin;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome r{false, ""};
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_budget = secs <= budget_seconds;
  const bool pass = r.ok && in_budget;
  if (!pass) ++failures;
  std::printf("%s %d %s: %s [%.2fs of %.0fs]\n", pass ? "PASS" : "FAIL", id, name, r.detail.c_str(), secs,
              budget_seconds);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const LocalTerm vee = LocalTerm::vee();

}  // namespace

int main() {
  criterion(1, "critical coupling", 1.0, [] {
    const double lc = exact::critical_lambda();
    return Outcome{std::abs(lc - 1.5) <= 1e-9, fmt("lambda_c = %.15f, |error| = %.2e (tol 1e-9)", lc, std::abs(lc - 1.5))};
  });

  criterion(2, "constant branch", 1.0, [] {
    double worst = 0.0;
    for (double l : {0.5, 1.0, 1.5, 3.0}) {
      const auto b = constant_branch(vee, MixtureKernel::exponential(l));
      const auto c = exact::constant_solution(l);
      const double d = 1.0 + 2.0 * l;
      worst = std::max({worst, std::abs(b.level - 1.0 / d), std::abs(b.energy - 2.0 * l / d),
                        std::abs(c.level - 1.0 / d), std::abs(c.specific_energy - 2.0 * l / d)});
    }
    return Outcome{worst <= 1e-10, fmt("max deviation %.2e (tol 1e-10)", worst)};
  });

  criterion(3, "kink oracle", 10.0, [] {
    std::vector<double> xs(1000), ys(100);
    for (int i = 0; i < 1000; ++i) xs[i] = 20.0 * i / 999.0;
    for (int i = 0; i < 100; ++i) ys[i] = 0.1 + 9.9 * i / 99.0;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> lam(1e-3, 10.0);
    double quartic = 0.0, integro = 0.0;
    for (int k = 0; k < 20; ++k) quartic = std::max(quartic, exact::quartic_ode_residual(exact::kink_parameters(lam(rng)), xs));
    for (double l : {0.5, 1.0, 1.5, 3.0}) integro = std::max(integro, exact::integro_ode_residual(exact::kink_parameters(l), ys));
    return Outcome{quartic <= 1e-10 && integro <= 1e-6,
                   fmt("quartic residual %.2e (tol 1e-10), integro residual %.2e (tol 1e-6)", quartic, integro)};
  });

  criterion(4, "regime dichotomy", 600.0, [] {
    SolverOptions opt;  // h = 0.02, T scanned over [0.5, 60]
    const auto base = MixtureKernel::exponential(1.0);
    const auto pts = phase_sweep(base, vee, {1.0, 3.0}, opt);
    const auto& a = pts[0];
    const auto& b = pts[1];
    const bool weak = a.regime == Regime::constant && std::abs(a.minimum_energy - 2.0 / 3.0) <= 1e-3;
    const bool strong = b.regime == Regime::periodic && b.minimum_energy < 6.0 / 7.0 - 1e-3 &&
                        b.optimal_half_period && std::isfinite(*b.optimal_half_period);
    const auto br = locate_transition(base, vee, 1.0, 3.0, 0.05, opt);
    const bool bracket = br.constant_side >= 1.35 && br.periodic_side <= 1.65;
    return Outcome{weak && strong && bracket,
                   "lambda=1 " + std::string(to_string(a.regime)) + fmt(" e0=%.6f; ", a.minimum_energy) +
                       "lambda=3 " + std::string(to_string(b.regime)) +
                       fmt(" e0=%.6f T*=%.4f; ", b.minimum_energy, b.optimal_half_period.value_or(NAN)) +
                       fmt("transition in [%.4f, %.4f]", br.constant_side, br.periodic_side)};
  });

  criterion(5, "reflection-positivity campaign", 120.0, [] {
    const auto v = MixtureKernel::exponential(1.0);
    double worst = 1e300;
    int failed = 0;
    for (auto kind : {CheckKind::lemma1, CheckKind::chessboard})
      for (unsigned long long s = 0; s < 100; ++s) {
        const auto c = run_campaign_case(42 + s, kind, v, vee);
        const double rel = c.result.margin / (1.0 + std::abs(c.result.lhs));
        worst = std::min(worst, rel);
        if (rel < -1e-8) ++failed;
      }
    return Outcome{failed == 0, fmt("200 cases, %.0f below tolerance, worst margin/(1+|lhs|) = %.3e (tol -1e-8)",
                                    static_cast<double>(failed), worst)};
  });

  criterion(6, "gradient correctness", 10.0, [] {
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto v = MixtureKernel::exponential(1.5);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      std::vector<double> f(30);
      for (auto& x : f) x = u(rng);
      const double T = 0.5 + 3.0 * u(rng);
      const auto g = per_period_gradient(Profile(T, f), v, vee);
      const auto fd = oracle::central_differences(
          [&](const std::vector<double>& x) { return per_period_energy(Profile(T, x), v, vee).total; }, f, 1e-6);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        num = std::max(num, std::abs(g[i] - fd[i]));
        den = std::max(den, std::abs(fd[i]));
      }
      worst = std::max(worst, num / den);
    }
    return Outcome{worst <= 1e-6, fmt("worst relative deviation %.2e over 50 profiles (tol 1e-6)", worst)};
  });

  criterion(7, "Euler-Lagrange consistency", 300.0, [] {
    const double lambda = 3.0;
    const auto v = MixtureKernel::exponential(lambda);
    const auto pt = outer_minimize(v, vee);
    // Snap T* to a multiple of the coarsest spacing so every level resolves the same period.
    const double T = 0.04 * std::round(pt.best_half_period / 0.04);
    SolverOptions opt;
    opt.tolerance = 1e-11;
    std::vector<double> r;
    bool converged = true;
    for (double h : {0.04, 0.02, 0.01, 0.005}) {
      const auto n = static_cast<std::size_t>(std::lround(T / h)) - 1;
      const auto rep = inner_minimize(T, n, v, vee, opt);
      converged = converged && rep.converged;
      r.push_back(euler_lagrange_residual(rep.profile, v, vee));
    }
    double worst = 1e300;
    for (std::size_t k = 1; k < r.size(); ++k) worst = std::min(worst, r[k - 1] / r[k]);
    return Outcome{converged && worst >= 3.5,
                   fmt("T=%.2f residuals %.2e -> ", T, r[0], r[1]) + fmt("%.2e -> %.2e -> ", r[1], r[2]) +
                       fmt("%.2e, smallest ratio %.2f (need 3.5)", r[3], worst)};
  });

  criterion(8, "convex large-T limit", 120.0, [] {
    const double T = 60.0;
    const auto rep = inner_minimize(T, grid_size_for(T, 0.02), MixtureKernel::exponential(1.0), vee);
    const double rel = std::abs(rep.energy.total / (2.0 / 3.0) - 1.0);
    return Outcome{rep.converged && rel <= 0.02, fmt("e_60 = %.6f, relative gap %.3e (tol 0.02)", rep.energy.total, rel)};
  });

  criterion(9, "exact symmetries", 60.0, [] {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0), excursion(0.0, 1.8);
    const auto v = MixtureKernel(1.2, {{0.5, 1.0}, {0.5, 2.5}});
    int broken = 0, clamp_broken = 0;
    for (int k = 0; k < 100; ++k) {
      std::vector<double> f(20 + k);
      for (auto& x : f) x = u(rng);
      const Profile p(0.02 * (f.size() + 1), f);
      if (!(reflect(reflect(p)) == p)) ++broken;
      if (per_period_energy(p, v, vee).total != per_period_energy(reflect(p), v, vee).total) ++broken;

      std::vector<double> g(20 + k);
      for (auto& x : g) x = excursion(rng);
      g[g.size() / 2] = 1.5;  // at least one excursion above 1
      const Profile q(0.02 * (g.size() + 1), g);
      if (per_period_energy(clamp_above(q), v, vee).total > per_period_energy(q, v, vee).total) ++clamp_broken;
    }
    return Outcome{broken == 0 && clamp_broken == 0,
                   fmt("%.0f symmetry violations, %.0f clamp violations over 100 profiles", broken, clamp_broken)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
