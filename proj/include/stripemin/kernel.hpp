#pragma once

// Reflection-positive long-range potentials built as finite mixtures of
// decaying exponentials, together with their antiperiodized lattice sums.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stripemin {

/// One exponential in the mixture: weight * exp(-rate * |x|).
struct DecayComponent {
  double weight = 1.0;
  double rate = 1.0;
};

/// v(x) = strength * sum_k weight_k * exp(-rate_k * |x|).
///
/// The weights form a probability vector, so v(0) equals the strength.
/// Every mixture of this form is completely monotone and reflection
/// positive, which is what the energy estimates rely on.
class MixtureKernel {
 public:
  MixtureKernel(double strength, std::vector<DecayComponent> components)
      : strength_(strength), components_(std::move(components)) {
    if (!(strength_ >= 0.0) || !std::isfinite(strength_))
      throw std::invalid_argument("MixtureKernel: strength must be finite and >= 0");
    if (components_.empty())
      throw std::invalid_argument("MixtureKernel: at least one component required");
    double total = 0.0;
    for (const auto& c : components_) {
      if (!(c.weight > 0.0) || !std::isfinite(c.weight))
        throw std::invalid_argument("MixtureKernel: weights must be positive");
      if (!(c.rate > 0.0) || !std::isfinite(c.rate))
        throw std::invalid_argument("MixtureKernel: rates must be positive");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("MixtureKernel: weights must sum to 1 (got " +
                                  std::to_string(total) + ")");
  }

  /// Single exponential strength * exp(-rate |x|).
  static MixtureKernel exponential(double strength, double rate = 1.0) {
    return MixtureKernel(strength, {{1.0, rate}});
  }

  double strength() const { return strength_; }
  const std::vector<DecayComponent>& components() const { return components_; }

  /// Same mixture with a different overall strength.
  MixtureKernel with_strength(double strength) const {
    return MixtureKernel(strength, components_);
  }

  double operator()(double x) const { return evaluate(x); }

  double evaluate(double x) const {
    const double ax = std::abs(x);
    double s = 0.0;
    for (const auto& c : components_) s += c.weight * std::exp(-c.rate * ax);
    return strength_ * s;
  }

  /// n-th derivative for x > 0, computed from the mixture analytically.
  double derivative(int order, double x) const {
    if (order < 0) throw std::invalid_argument("MixtureKernel::derivative: negative order");
    if (!(x > 0.0)) throw std::invalid_argument("MixtureKernel::derivative: requires x > 0");
    double s = 0.0;
    for (const auto& c : components_)
      s += c.weight * std::pow(-c.rate, order) * std::exp(-c.rate * x);
    return strength_ * s;
  }

  /// Integral of v over the whole line: 2 * strength * sum_k weight_k / rate_k.
  double total_integral() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight / c.rate;
    return 2.0 * strength_ * s;
  }

  /// sum_k weight_k * rate_k * strength; the jump of -v' across the origin is
  /// twice this value.
  double first_moment_rate() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight * c.rate;
    return strength_ * s;
  }

  double min_rate() const {
    double m = components_.front().rate;
    for (const auto& c : components_) m = std::min(m, c.rate);
    return m;
  }

 private:
  double strength_;
  std::vector<DecayComponent> components_;
};

/// Discrete quadrature of nu(d alpha) proportional to alpha^(exponent-1) on
/// [rate_min, rate_max]. Nodes are log-spaced midpoints; for large x the
/// resulting v(x) behaves like x^(-exponent) between 1/rate_max and 1/rate_min.
inline MixtureKernel power_law_approximation(double strength, double exponent, int rate_count,
                                             double rate_min, double rate_max) {
  if (!(exponent > 1.0))
    throw std::invalid_argument("power_law_approximation: exponent must exceed 1");
  if (rate_count < 1)
    throw std::invalid_argument("power_law_approximation: rate_count must be >= 1");
  if (!(rate_min > 0.0) || !(rate_max >= rate_min) || !std::isfinite(rate_max))
    throw std::invalid_argument("power_law_approximation: empty or invalid rate range");
  if (rate_count > 1 && rate_max == rate_min)
    throw std::invalid_argument("power_law_approximation: empty rate range");

  std::vector<DecayComponent> comps;
  if (rate_count == 1 || rate_max == rate_min) {
    comps.push_back({1.0, std::sqrt(rate_min * rate_max)});
    return MixtureKernel(strength, std::move(comps));
  }
  const double lo = std::log(rate_min), hi = std::log(rate_max);
  const double dlog = (hi - lo) / rate_count;
  std::vector<double> w(rate_count);
  comps.resize(rate_count);
  for (int k = 0; k < rate_count; ++k) {
    const double a = std::exp(lo + (k + 0.5) * dlog);
    // alpha^(p-1) d alpha = alpha^p d log(alpha)
    w[k] = std::pow(a, exponent) * dlog;
    comps[k].rate = a;
  }
  // Normalize twice: the second pass absorbs the rounding of the first so the
  // sum lands within a few ulps of 1.
  for (int pass = 0; pass < 2; ++pass) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
  }
  for (int k = 0; k < rate_count; ++k) comps[k].weight = w[k];
  return MixtureKernel(strength, std::move(comps));
}

/// Antiperiodized kernel on [0,T]:
///   sum_n [ v(2nT + y - x) - v(y + x + 2nT) ]
/// summed in closed form per exponential component.
class PeriodizedKernel {
 public:
  PeriodizedKernel(MixtureKernel base, double period) : base_(std::move(base)), period_(period) {
    if (!(period_ > 0.0) || !std::isfinite(period_))
      throw std::invalid_argument("PeriodizedKernel: period must be positive");
  }

  const MixtureKernel& base() const { return base_; }
  double period() const { return period_; }

  double operator()(double x, double y) const { return evaluate(x, y); }

  double evaluate(double x, double y) const {
    if (x < 0.0 || x > period_ || y < 0.0 || y > period_)
      throw std::out_of_range("PeriodizedKernel: arguments must lie in [0, T]");
    double s = 0.0;
    for (const auto& c : base_.components())
      s += c.weight * (image_sum(c.rate, y - x) - image_sum(c.rate, y + x));
    return base_.strength() * s;
  }

 private:
  // sum_n exp(-rate |u + 2nT|) for |u| <= 2T.
  double image_sum(double rate, double u) const {
    const double au = std::abs(u);
    const double q = -std::expm1(-2.0 * rate * period_);
    return (std::exp(-rate * au) + std::exp(-rate * (2.0 * period_ - au))) / q;
  }

  MixtureKernel base_;
  double period_;
};

/// Matrix-free action of the periodized kernel on the uniform interior grid
/// x_i = i h, i = 1..n, T = (n+1) h. Each exponential component is applied
/// with two recursive sweeps and a few prefix sums, so a product costs
/// O(n * components) and never forms the n x n matrix.
class PeriodizedGridOperator {
 public:
  PeriodizedGridOperator(const MixtureKernel& kernel, double period, std::size_t n)
      : n_(n), period_(period), h_(period / static_cast<double>(n + 1)) {
    if (n == 0) throw std::invalid_argument("PeriodizedGridOperator: empty grid");
    if (!(period > 0.0)) throw std::invalid_argument("PeriodizedGridOperator: period must be positive");
    for (const auto& c : kernel.components()) {
      Component comp;
      const double a = c.rate;
      comp.scale = kernel.strength() * c.weight / (-std::expm1(-2.0 * a * period));
      comp.step = std::exp(-a * h_);
      comp.near_lo.resize(n);
      comp.near_hi.resize(n);
      comp.far_lo.resize(n);
      const double eT = std::exp(-a * period);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i + 1) * h_;
        const double tx = static_cast<double>(n - i) * h_;  // T - x
        comp.near_lo[i] = std::exp(-a * x);
        comp.near_hi[i] = std::exp(-a * tx);
        comp.far_lo[i] = eT * comp.near_lo[i];  // exp(-a (T + x))
      }
      components_.push_back(std::move(comp));
    }
  }

  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  double period() const { return period_; }

  /// out = K f, with K_ij = periodized kernel at (x_i, x_j).
  void apply(std::span<const double> f, std::span<double> out) const {
    if (f.size() != n_ || out.size() != n_)
      throw std::invalid_argument("PeriodizedGridOperator::apply: size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> fwd(n_), bwd(n_), bwd_wrap(n_);
    for (const auto& c : components_) {
      // sum_j exp(-a |x_i - x_j|) f_j
      double acc = 0.0;
      for (std::size_t i = 0; i < n_; ++i) fwd[i] = acc = f[i] + c.step * acc;
      acc = 0.0;
      for (std::size_t i = n_; i-- > 0;) bwd[i] = acc = f[i] + c.step * acc;

      // sum_j exp(-a (x_i + x_j)) f_j and sum_j exp(-a (2T - x_i - x_j)) f_j
      double lo_moment = 0.0, hi_moment = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        lo_moment += c.near_lo[j] * f[j];
        hi_moment += c.near_hi[j] * f[j];
      }

      // sum_j exp(-a (2T - |x_i - x_j|)) f_j, split at j <= i and j > i.
      acc = 0.0;
      for (std::size_t i = n_; i-- > 0;) {
        bwd_wrap[i] = acc;
        acc += c.near_hi[i] * f[i];
      }
      double prefix = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        prefix += c.far_lo[i] * f[i];
        const double wrap = c.near_hi[i] * prefix + c.far_lo[i] * bwd_wrap[i];
        const double direct = fwd[i] + bwd[i] - f[i];
        const double mirror = c.near_lo[i] * lo_moment + c.near_hi[i] * hi_moment;
        out[i] += c.scale * (direct + wrap - mirror);
      }
    }
  }

  std::vector<double> apply(std::span<const double> f) const {
    std::vector<double> out(n_);
    apply(f, out);
    return out;
  }

 private:
  struct Component {
    double scale = 0.0;
    double step = 0.0;
    std::vector<double> near_lo, near_hi, far_lo;
  };

  std::size_t n_;
  double period_;
  double h_;
  std::vector<Component> components_;
};

/// Matrix-free action of the bare kernel v(x_i - x_j) on a uniform grid of
/// m points with spacing h (no periodization).
inline void apply_bare_kernel(const MixtureKernel& kernel, double h, std::span<const double> f,
                              std::span<double> out) {
  const std::size_t m = f.size();
  if (out.size() != m) throw std::invalid_argument("apply_bare_kernel: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> fwd(m), bwd(m);
  for (const auto& c : kernel.components()) {
    const double r = std::exp(-c.rate * h);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) fwd[i] = acc = f[i] + r * acc;
    acc = 0.0;
    for (std::size_t i = m; i-- > 0;) bwd[i] = acc = f[i] + r * acc;
    const double s = kernel.strength() * c.weight;
    for (std::size_t i = 0; i < m; ++i) out[i] += s * (fwd[i] + bwd[i] - f[i]);
  }
}

}  // namespace stripemin
