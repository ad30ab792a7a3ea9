#pragma once

// Constrained minimization of the per-period energy over profiles with values
// in [0, 1], the outer minimization over the half-period T, and the
// periodic-versus-constant classification built on top of them.
//
// Reported periods are half-periods: the full minimizer on the line is the
// antiperiodic extension of the [0, T] profile and repeats with period 2T.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "stripemin/energy.hpp"
#include "stripemin/kernel.hpp"
#include "stripemin/local_term.hpp"
#include "stripemin/parallel.hpp"
#include "stripemin/profile.hpp"
#include "stripemin/scalar_search.hpp"

namespace stripemin {

struct SolverOptions {
  // inner solve
  double tolerance = 1e-8;  // projected-gradient inf-norm <= tolerance * (1 + |e|)
  int max_iterations = 50000;
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;
  int random_restarts = 0;  // extra seeded starts on top of the fixed set
  unsigned long long seed = 0;
  bool keep_trace = false;  // record the energy after every accepted step

  // outer minimization
  double t_min = 0.5;
  double t_max = 60.0;
  double max_spacing = 0.02;
  int scan_points = 24;
  double refine_tolerance = 1e-3;  // relative width of the final golden bracket
  int max_refine_iterations = 40;
  double classification_margin = 1e-4;

  void validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("SolverOptions: tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("SolverOptions: max_iterations must be >= 1");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
      throw std::invalid_argument("SolverOptions: backtrack_factor must lie in (0,1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 0.5))
      throw std::invalid_argument("SolverOptions: sufficient_decrease must lie in (0,1/2)");
    if (!(t_min > 0.0 && t_max > t_min)) throw std::invalid_argument("SolverOptions: need 0 < t_min < t_max");
    if (!(max_spacing > 0.0)) throw std::invalid_argument("SolverOptions: max_spacing must be positive");
    if (scan_points < 24) throw std::invalid_argument("SolverOptions: scan_points must be >= 24");
    if (!(classification_margin > 0.0))
      throw std::invalid_argument("SolverOptions: classification_margin must be positive");
  }
};

struct InnerSolveReport {
  Profile profile;
  EnergyBreakdown energy;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

namespace detail {

inline double clip_unit(double v) { return std::clamp(v, 0.0, 1.0); }

inline double projected_gradient_norm(std::span<const double> x, std::span<const double> g) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - clip_unit(x[i] - g[i])));
  return m;
}

// Two-metric projected descent: on the free coordinates the step solves with
// a tridiagonal preconditioner P = (2 L / h + c h I) / T, L the Dirichlet
// Laplacian stencil; coordinates pinned at a bound with the gradient pushing
// outward take a diagonally scaled gradient step. The arc x(t) = clip(x + t d)
// is backtracked until it satisfies a sufficient-decrease test.
class BoxSolver {
 public:
  BoxSolver(const PeriodEnergy& energy, const MixtureKernel& kernel, const SolverOptions& opt)
      : e_(energy), opt_(opt), n_(energy.size()) {
    const double h = energy.spacing(), T = energy.period();
    const double c = std::max(0.5, energy.term().reference_curvature()) + kernel.total_integral();
    diag_ = (4.0 / h + c * h) / T;
    off_ = -2.0 / (h * T);
  }

  InnerSolveReport run(std::vector<double> x) const {
    for (auto& v : x) v = clip_unit(v);
    InnerSolveReport rep{Profile(e_.period(), x), {}, 0.0, 0, false, {}};
    std::vector<double> g(n_), g_trial(n_), d(n_), trial(n_);
    double energy = e_.value(x);
    e_.gradient(x, g);
    if (opt_.keep_trace) rep.trace.push_back(energy);

    int it = 0;
    double pg = projected_gradient_norm(x, g);
    for (; it < opt_.max_iterations; ++it) {
      if (pg <= opt_.tolerance * (1.0 + std::abs(energy))) {
        rep.converged = true;
        break;
      }
      bool accepted = false;
      for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
        if (attempt == 0)
          two_metric_direction(x, g, d);
        else
          scaled_gradient_direction(g, d);
        double t = 1.0;
        for (int b = 0; b < opt_.max_backtracks; ++b, t *= opt_.backtrack_factor) {
          double model = 0.0;
          bool moved = false;
          for (std::size_t i = 0; i < n_; ++i) {
            trial[i] = clip_unit(x[i] + t * d[i]);
            model += g[i] * (trial[i] - x[i]);
            moved = moved || trial[i] != x[i];
          }
          if (!moved) break;
          if (!(model < 0.0)) continue;
          const double e_trial = e_.value(trial);
          if (!(e_trial <= energy)) {
            // Differences below rounding: fall through to the gradient-based test.
            if (!(e_trial - energy <= rounding_slack(energy))) continue;
          }
          e_.gradient(trial, g_trial);
          if (!sufficient_decrease(energy, e_trial, model, x, trial, g, g_trial)) continue;
          x.swap(trial);
          g.swap(g_trial);
          energy = e_trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      if (opt_.keep_trace) rep.trace.push_back(energy);
      pg = projected_gradient_norm(x, g);
    }
    if (!rep.converged && pg <= opt_.tolerance * (1.0 + std::abs(energy))) rep.converged = true;
    rep.profile = Profile(e_.period(), std::move(x));
    rep.projected_gradient_norm = pg;
    rep.iterations = it;
    return rep;
  }

 private:
  static double rounding_slack(double energy) {
    return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(energy));
  }

  // Armijo test on function values while they resolve the decrease; once the
  // change sinks into rounding, the trapezoid estimate (g + g_trial)/2 . step
  // (exact for quadratic energies) takes over.
  bool sufficient_decrease(double e0, double e1, double model, std::span<const double> x,
                           std::span<const double> trial, std::span<const double> g,
                           std::span<const double> g_trial) const {
    const double sigma = opt_.sufficient_decrease;
    if (std::abs(model) > 1e3 * rounding_slack(e0)) return e1 <= e0 + sigma * model;
    double est = 0.0;
    for (std::size_t i = 0; i < n_; ++i) est += 0.5 * (g[i] + g_trial[i]) * (trial[i] - x[i]);
    return est <= sigma * model && e1 <= e0 + rounding_slack(e0);
  }

  void scaled_gradient_direction(std::span<const double> g, std::span<double> d) const {
    for (std::size_t i = 0; i < n_; ++i) d[i] = -g[i] / diag_;
  }

  void two_metric_direction(std::span<const double> x, std::span<const double> g,
                            std::span<double> d) const {
    double w = 0.0;
    for (std::size_t i = 0; i < n_; ++i) w = std::max(w, std::abs(x[i] - clip_unit(x[i] - g[i] / diag_)));
    const double eps = std::min(1e-3, w);
    std::vector<char> free(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const bool at_lo = x[i] <= eps && g[i] > 0.0;
      const bool at_hi = x[i] >= 1.0 - eps && g[i] < 0.0;
      free[i] = !(at_lo || at_hi);
      if (!free[i]) d[i] = -g[i] / diag_;
    }
    // Thomas algorithm over the free coordinates; couplings exist only
    // between index neighbours that are both free.
    std::vector<double> cprime(n_), rhs(n_);
    std::ptrdiff_t prev = -1;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!free[i]) {
        prev = -1;
        continue;
      }
      const bool linked = prev >= 0 && static_cast<std::size_t>(prev) + 1 == i;
      const double lower = linked ? off_ : 0.0;
      const double denom = diag_ - (linked ? lower * cprime[i - 1] : 0.0);
      cprime[i] = off_ / denom;
      rhs[i] = (-g[i] - (linked ? lower * rhs[i - 1] : 0.0)) / denom;
      prev = static_cast<std::ptrdiff_t>(i);
    }
    bool next_free = false;
    for (std::size_t i = n_; i-- > 0;) {
      if (!free[i]) {
        next_free = false;
        continue;
      }
      d[i] = rhs[i] - (next_free ? cprime[i] * d[i + 1] : 0.0);
      next_free = true;
    }
  }

  const PeriodEnergy& e_;
  const SolverOptions& opt_;
  std::size_t n_;
  double diag_ = 1.0;
  double off_ = 0.0;
};

}  // namespace detail

/// The fixed deterministic start set: c sin(pi x / T) for c in {0.25, 0.5, 0.9}
/// and a plateau ramp of height min(1, 2 t0), plus any seeded random starts.
inline std::vector<std::vector<double>> initial_profiles(double period, std::size_t n, double plateau,
                                                         const SolverOptions& opt) {
  std::vector<std::vector<double>> starts;
  const double h = period / static_cast<double>(n + 1);
  for (double c : {0.25, 0.5, 0.9}) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = c * std::sin(std::numbers::pi * static_cast<double>(i + 1) * h / period);
    starts.push_back(std::move(v));
  }
  {
    const double height = std::min(1.0, 2.0 * plateau);
    const double width = std::min(0.25 * period, 1.0);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = static_cast<double>(i + 1) * h;
      v[i] = height * std::min({1.0, x / width, (period - x) / width});
    }
    starts.push_back(std::move(v));
  }
  for (int r = 0; r < opt.random_restarts; ++r) {
    std::mt19937_64 rng(opt.seed + static_cast<unsigned long long>(r));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> amp(6);
    for (auto& a : amp) a = unit(rng) - 0.5;
    const double height = unit(rng);
    std::vector<double> v(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = static_cast<double>(i + 1) * h / period;
      double acc = std::sin(std::numbers::pi * s);
      for (std::size_t k = 0; k < amp.size(); ++k)
        acc += amp[k] * std::sin(std::numbers::pi * static_cast<double>(k + 2) * s);
      v[i] = std::abs(acc);
      peak = std::max(peak, v[i]);
    }
    for (auto& x : v) x = peak > 0.0 ? height * x / peak : 0.0;
    starts.push_back(std::move(v));
  }
  return starts;
}

/// e_T: minimum of the discrete per-period energy over profiles in [0,1]^n
/// for a fixed half-period T.
inline InnerSolveReport inner_minimize(double period, std::size_t n, const MixtureKernel& kernel,
                                       const LocalTerm& term, const SolverOptions& opt = {}) {
  if (!(period > 0.0)) throw std::invalid_argument("inner_minimize: T must be positive");
  if (n < 3) throw std::invalid_argument("inner_minimize: need n >= 3");
  opt.validate();
  const PeriodEnergy energy(kernel, term, period, n);
  const detail::BoxSolver solver(energy, kernel, opt);
  const double plateau = constant_branch(term, kernel).level;

  std::optional<InnerSolveReport> best;
  for (auto& start : initial_profiles(period, n, plateau, opt)) {
    auto rep = solver.run(std::move(start));
    rep.energy = energy.breakdown(rep.profile.values());
    const bool better =
        !best || (rep.converged && !best->converged) ||
        (rep.converged == best->converged && rep.energy.total < best->energy.total);
    if (better) best = std::move(rep);
  }
  return std::move(*best);
}

enum class Regime { constant, periodic, unclassified };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::constant: return "constant";
    case Regime::periodic: return "periodic";
    case Regime::unclassified: return "unclassified";
  }
  return "?";
}

struct PhasePoint {
  double coupling = 0.0;
  std::optional<double> optimal_half_period;  // T*, periodic regime only
  double minimum_energy = 0.0;                // e0 estimate
  double constant_energy = 0.0;
  Regime regime = Regime::unclassified;
  bool near_threshold = false;   // best periodic energy within the margin of the constant branch
  double best_half_period = 0.0;  // argmin of the scanned e_T, reported in every regime
  double best_periodic_energy = 0.0;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  int inner_solves = 0;
};

/// Scan e_T on a log-spaced grid of T, refine the best scan point by
/// golden-section search, and compare with the constant branch.
///
/// A point is periodic when the best e_T lies strictly inside the scanned
/// range and beats the constant branch by more than the classification
/// margin. Otherwise it is constant and e0 is the smaller of the two
/// energies, because constant profiles are reached in the T -> infinity
/// limit. If the inner solve at the selected T fails to converge, the point
/// is unclassified.
inline PhasePoint outer_minimize(const MixtureKernel& kernel, const LocalTerm& term,
                                 const SolverOptions& opt = {}) {
  opt.validate();
  PhasePoint pt;
  pt.coupling = kernel.strength();
  pt.constant_energy = constant_branch(term, kernel).energy;

  std::map<double, InnerSolveReport> cache;
  auto solve_at = [&](double T) -> const InnerSolveReport& {
    auto it = cache.find(T);
    if (it == cache.end())
      it = cache.emplace(T, inner_minimize(T, grid_size_for(T, opt.max_spacing), kernel, term, opt)).first;
    return it->second;
  };

  const int m = opt.scan_points;
  std::vector<double> grid(m);
  const double ratio = std::log(opt.t_max / opt.t_min);
  for (int k = 0; k < m; ++k) grid[k] = opt.t_min * std::exp(ratio * k / (m - 1));
  grid.back() = opt.t_max;

  int best = 0;
  for (int k = 0; k < m; ++k) {
    if (solve_at(grid[k]).energy.total < solve_at(grid[best]).energy.total) best = k;
  }

  if (best < m - 1) {
    const double lo = grid[std::max(0, best - 1)], hi = grid[best + 1];
    golden_section_minimize([&](double T) { return solve_at(T).energy.total; }, lo, hi,
                            opt.refine_tolerance * (hi - lo), opt.max_refine_iterations);
  }

  // Smallest T wins among equal energies; the map iterates in increasing T.
  double t_best = cache.begin()->first;
  for (const auto& [T, rep] : cache)
    if (rep.energy.total < cache.at(t_best).energy.total) t_best = T;
  const auto& rep = cache.at(t_best);

  pt.best_half_period = t_best;
  pt.best_periodic_energy = rep.energy.total;
  pt.projected_gradient_norm = rep.projected_gradient_norm;
  pt.iterations = rep.iterations;
  pt.inner_solves = static_cast<int>(cache.size());

  const double margin = opt.classification_margin;
  if (!rep.converged) {
    pt.regime = Regime::unclassified;
    pt.minimum_energy = std::min(rep.energy.total, pt.constant_energy);
    return pt;
  }
  const bool interior = t_best < opt.t_max;
  if (interior && rep.energy.total < pt.constant_energy - margin) {
    pt.regime = Regime::periodic;
    pt.optimal_half_period = t_best;
    pt.minimum_energy = rep.energy.total;
  } else {
    pt.regime = Regime::constant;
    pt.minimum_energy = std::min(rep.energy.total, pt.constant_energy);
    pt.near_threshold = std::abs(rep.energy.total - pt.constant_energy) <= margin;
  }
  return pt;
}

struct SweepError : std::runtime_error {
  SweepError(const std::string& what, std::vector<PhasePoint> pts)
      : std::runtime_error(what), points(std::move(pts)) {}
  std::vector<PhasePoint> points;
};

/// One phase point per coupling in `couplings` (positive, sorted ascending),
/// evaluated on up to `workers` threads. Throws SweepError carrying all
/// points if any of them is unclassified.
inline std::vector<PhasePoint> phase_sweep(const MixtureKernel& kernel, const LocalTerm& term,
                                           const std::vector<double>& couplings,
                                           const SolverOptions& opt = {}, unsigned workers = 1) {
  if (couplings.empty()) throw std::invalid_argument("phase_sweep: empty coupling list");
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    if (!(couplings[i] > 0.0)) throw std::invalid_argument("phase_sweep: couplings must be positive");
    if (i > 0 && !(couplings[i] > couplings[i - 1]))
      throw std::invalid_argument("phase_sweep: couplings must be sorted ascending");
  }
  auto pts = parallel_map<PhasePoint>(couplings.size(), workers, [&](std::size_t i) {
    return outer_minimize(kernel.with_strength(couplings[i]), term, opt);
  });
  for (const auto& p : pts)
    if (p.regime == Regime::unclassified)
      throw SweepError("phase_sweep: unclassified point at lambda = " + std::to_string(p.coupling),
                       std::move(pts));
  return pts;
}

/// True when no constant point follows a periodic one.
inline bool regimes_monotone(const std::vector<PhasePoint>& pts) {
  bool seen_periodic = false;
  for (const auto& p : pts) {
    if (p.regime == Regime::periodic) seen_periodic = true;
    if (p.regime == Regime::constant && seen_periodic) return false;
  }
  return true;
}

struct TransitionBracket {
  double constant_side;
  double periodic_side;
  std::vector<PhasePoint> evaluated;
};

/// Bisection on the regime flag between a constant coupling and a periodic
/// one, until the bracket is narrower than `width`.
inline TransitionBracket locate_transition(const MixtureKernel& kernel, const LocalTerm& term,
                                           double constant_side, double periodic_side, double width,
                                           const SolverOptions& opt = {}) {
  TransitionBracket br{constant_side, periodic_side, {}};
  auto classify = [&](double lambda) {
    br.evaluated.push_back(outer_minimize(kernel.with_strength(lambda), term, opt));
    const auto r = br.evaluated.back().regime;
    if (r == Regime::unclassified)
      throw std::runtime_error("locate_transition: unclassified point at lambda = " + std::to_string(lambda));
    return r;
  };
  if (classify(constant_side) != Regime::constant)
    throw std::runtime_error("locate_transition: lower end is not in the constant regime");
  if (classify(periodic_side) != Regime::periodic)
    throw std::runtime_error("locate_transition: upper end is not in the periodic regime");
  while (br.periodic_side - br.constant_side > width) {
    const double mid = 0.5 * (br.constant_side + br.periodic_side);
    if (classify(mid) == Regime::periodic)
      br.periodic_side = mid;
    else
      br.constant_side = mid;
  }
  return br;
}

}  // namespace stripemin
