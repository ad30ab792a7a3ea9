#pragma once

// Discrete per-period and finite-volume energies.
//
// Quadrature: forward differences for the gradient term, trapezoid for the
// local term (F(0) at both Dirichlet ends with half weight), and the tensor
// trapezoid with the closed-form periodized kernel for the interaction. The
// optimizer works on this discrete energy directly.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "stripemin/kernel.hpp"
#include "stripemin/local_term.hpp"
#include "stripemin/profile.hpp"

namespace stripemin {

struct EnergyBreakdown {
  double kinetic = 0.0;
  double local = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

/// e_inf and its gradient for a fixed (kernel, local term, T, n). Holds the
/// precomputed grid operator so repeated evaluations inside an optimizer do
/// not rebuild it.
class PeriodEnergy {
 public:
  PeriodEnergy(const MixtureKernel& kernel, const LocalTerm& term, double period, std::size_t n)
      : term_(term), op_(kernel, period, n), period_(period), h_(op_.spacing()),
        kink_moment_(kernel.first_moment_rate()) {}

  std::size_t size() const { return op_.size(); }
  double period() const { return period_; }
  double spacing() const { return h_; }
  const LocalTerm& term() const { return term_; }
  const PeriodizedGridOperator& op() const { return op_; }
  double kink_moment() const { return kink_moment_; }

  /// Breakdown evaluated in the given summation order. `breakdown` averages the
  /// two orders so that reversed profiles give bit-identical energies.
  EnergyBreakdown one_sided(std::span<const double> f) const {
    check(f);
    const std::size_t n = f.size();
    double kin = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = f[i] - prev;
      kin += d * d;
      prev = f[i];
    }
    kin += prev * prev;

    double loc = term_.bounded_value(0.0);
    for (double v : f) loc += term_.bounded_value(v);

    scratch_.resize(n);
    op_.apply(f, scratch_);
    double inter = 0.0;
    for (std::size_t i = 0; i < n; ++i) inter += f[i] * scratch_[i];

    EnergyBreakdown e;
    e.kinetic = kin / (h_ * period_);
    e.local = h_ * loc / period_;
    e.interaction = h_ * h_ * inter / period_;
    e.total = e.kinetic + e.local + e.interaction;
    return e;
  }

  EnergyBreakdown breakdown(std::span<const double> f) const {
    std::vector<double> rev(f.rbegin(), f.rend());
    const auto a = one_sided(f);
    const auto b = one_sided(rev);
    EnergyBreakdown e;
    e.kinetic = 0.5 * (a.kinetic + b.kinetic);
    e.local = 0.5 * (a.local + b.local);
    e.interaction = 0.5 * (a.interaction + b.interaction);
    e.total = e.kinetic + e.local + e.interaction;
    return e;
  }

  double value(std::span<const double> f) const { return one_sided(f).total; }

  /// d e_inf / d f_i = [2(2f_i - f_{i-1} - f_{i+1})/h + h F'(f_i) + 2 h^2 (K f)_i] / T,
  /// with F'(0) taken as the limit from above.
  void gradient(std::span<const double> f, std::span<double> out) const {
    check(f);
    const std::size_t n = f.size();
    if (out.size() != n) throw std::invalid_argument("PeriodEnergy::gradient: size mismatch");
    op_.apply(f, out);
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? f[i - 1] : 0.0;
      const double right = i + 1 < n ? f[i + 1] : 0.0;
      const double lap = 2.0 * f[i] - left - right;
      out[i] = (2.0 * lap / h_ + h_ * term_.slope(f[i]) + 2.0 * h_ * h_ * out[i]) / period_;
    }
  }

  std::vector<double> gradient(std::span<const double> f) const {
    std::vector<double> g(f.size());
    gradient(f, g);
    return g;
  }

  /// max_i |D2 f_i - F'(f_i)/2 - h (K f)_i|: the discrete stationarity
  /// condition, equal to |gradient_i| * T / (2h).
  double stationarity_residual(std::span<const double> f) const {
    check(f);
    const std::size_t n = f.size();
    std::vector<double> kf(n);
    op_.apply(f, kf);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? f[i - 1] : 0.0;
      const double right = i + 1 < n ? f[i + 1] : 0.0;
      const double d2 = (left - 2.0 * f[i] + right) / (h_ * h_);
      worst = std::max(worst, std::abs(d2 - 0.5 * term_.slope(f[i]) - h_ * kf[i]));
    }
    return worst;
  }

  /// Residual of the continuum Euler-Lagrange equation
  ///   f'' = F'(f)/2 + integral of the periodized kernel against f,
  /// evaluated with fourth-order operators: the five-point second difference
  /// and the trapezoid rule with its Euler-Maclaurin correction for the kernel
  /// cusp on the diagonal. Because these differ from the second-order
  /// operators that define the discrete energy, the residual of an exact
  /// discrete minimizer measures its O(h^2) distance from the continuum
  /// solution. Nodes adjacent to the walls (which lack a centred five-point
  /// stencil) are skipped; with fewer than three samples the discrete
  /// stationarity residual is returned.
  double euler_lagrange_residual(std::span<const double> f) const {
    check(f);
    const std::size_t n = f.size();
    if (n < 3) return stationarity_residual(f);
    std::vector<double> kf(n);
    op_.apply(f, kf);
    auto at = [&](std::ptrdiff_t i) {
      return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : f[static_cast<std::size_t>(i)];
    };
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const auto i = static_cast<std::ptrdiff_t>(k);
      const double d2 = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) /
                        (12.0 * h_ * h_);
      const double integral = h_ * kf[k] - h_ * h_ / 6.0 * kink_moment_ * f[k];
      worst = std::max(worst, std::abs(d2 - 0.5 * term_.slope(f[k]) - integral));
    }
    return worst;
  }

 private:
  void check(std::span<const double> f) const {
    if (f.size() != op_.size()) throw std::invalid_argument("PeriodEnergy: profile size mismatch");
  }

  LocalTerm term_;
  PeriodizedGridOperator op_;
  double period_;
  double h_;
  double kink_moment_;
  mutable std::vector<double> scratch_;
};

/// e_inf(f) = K_f + V_f + W_f for a profile on [0, T].
inline EnergyBreakdown per_period_energy(const Profile& f, const MixtureKernel& kernel,
                                         const LocalTerm& term) {
  return PeriodEnergy(kernel, term, f.period(), f.size()).breakdown(f.values());
}

inline std::vector<double> per_period_gradient(const Profile& f, const MixtureKernel& kernel,
                                               const LocalTerm& term) {
  return PeriodEnergy(kernel, term, f.period(), f.size()).gradient(f.values());
}

inline double stationarity_residual(const Profile& f, const MixtureKernel& kernel,
                                    const LocalTerm& term) {
  return PeriodEnergy(kernel, term, f.period(), f.size()).stationarity_residual(f.values());
}

inline double euler_lagrange_residual(const Profile& f, const MixtureKernel& kernel,
                                      const LocalTerm& term) {
  return PeriodEnergy(kernel, term, f.period(), f.size()).euler_lagrange_residual(f.values());
}

enum class Boundary { free, dirichlet };

/// Finite-volume energy on [0, L] with the bare kernel v(x - y) and no
/// normalization by length. Dirichlet boundaries pin both endpoint values to
/// zero; free boundaries treat them as ordinary samples.
inline EnergyBreakdown finite_volume_energy(const Segment& seg, const MixtureKernel& kernel,
                                            const LocalTerm& term, Boundary boundary) {
  if (seg.values.size() < 2) throw std::invalid_argument("finite_volume_energy: need at least one cell");
  if (!(seg.length > 0.0)) throw std::invalid_argument("finite_volume_energy: length must be positive");
  std::vector<double> phi = seg.values;
  if (boundary == Boundary::dirichlet) phi.front() = phi.back() = 0.0;
  const std::size_t m = phi.size();
  const double h = seg.spacing();

  double kin = 0.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double d = phi[k + 1] - phi[k];
    kin += d * d;
  }
  double loc = 0.5 * (term.bounded_value(phi.front()) + term.bounded_value(phi.back()));
  for (std::size_t k = 1; k + 1 < m; ++k) loc += term.bounded_value(phi[k]);

  std::vector<double> u(m), vu(m);
  for (std::size_t k = 0; k < m; ++k) u[k] = phi[k] * ((k == 0 || k + 1 == m) ? 0.5 * h : h);
  apply_bare_kernel(kernel, h, u, vu);
  double inter = 0.0;
  for (std::size_t k = 0; k < m; ++k) inter += u[k] * vu[k];

  EnergyBreakdown e;
  e.kinetic = kin / h;
  e.local = h * loc;
  e.interaction = inter;
  e.total = e.kinetic + e.local + e.interaction;
  return e;
}

inline double dirichlet_energy(const Segment& seg, const MixtureKernel& kernel, const LocalTerm& term) {
  return finite_volume_energy(seg, kernel, term, Boundary::dirichlet).total;
}

}  // namespace stripemin
