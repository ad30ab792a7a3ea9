#pragma once

// Even double-well local free-energy densities F with F(+-1) = 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "stripemin/kernel.hpp"
#include "stripemin/scalar_search.hpp"

namespace stripemin {

enum class LocalVariant { quartic, vee, entropy };

inline std::string_view to_string(LocalVariant v) {
  switch (v) {
    case LocalVariant::quartic: return "quartic";
    case LocalVariant::vee: return "vee";
    case LocalVariant::entropy: return "entropy";
  }
  return "?";
}

inline LocalVariant parse_local_variant(std::string_view s) {
  if (s == "quartic") return LocalVariant::quartic;
  if (s == "vee") return LocalVariant::vee;
  if (s == "entropy") return LocalVariant::entropy;
  throw std::invalid_argument("unknown local term variant '" + std::string(s) + "'");
}

/// Returned by `LocalTerm::bounded_value` outside the entropy domain.
inline constexpr double kInfiniteEnergySentinel = 1e30;

/// Local term F:
///   quartic  (t^2 - 1)^2
///   vee      (|t| - 1)^2
///   entropy  a(t) - a(1), with a(t) = -t^2 + [(1+at)log(1+at) + (1-at)log(1-at)]/(a b)
///            and a = tanh(b); +infinity for |t| >= 1/a.
class LocalTerm {
 public:
  static LocalTerm quartic() { return LocalTerm(LocalVariant::quartic, 0.0); }
  static LocalTerm vee() { return LocalTerm(LocalVariant::vee, 0.0); }
  static LocalTerm entropy(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw std::invalid_argument("LocalTerm::entropy: beta must be positive");
    return LocalTerm(LocalVariant::entropy, beta);
  }

  LocalVariant variant() const { return variant_; }
  double beta() const { return beta_; }
  double alpha() const { return alpha_; }

  /// F(t); +infinity outside the entropy domain.
  double value(double t) const {
    const double a = std::abs(t);
    switch (variant_) {
      case LocalVariant::quartic: {
        const double d = a * a - 1.0;
        return d * d;
      }
      case LocalVariant::vee: return (a - 1.0) * (a - 1.0);
      case LocalVariant::entropy: {
        if (alpha_ * a >= 1.0) return std::numeric_limits<double>::infinity();
        return std::max(0.0, mean_field(a) - mean_field_at_one_);
      }
    }
    return 0.0;
  }

  /// F(t) with the infinite branch replaced by a large finite sentinel, for
  /// use inside line searches.
  double bounded_value(double t) const {
    const double v = value(t);
    return std::isfinite(v) ? v : kInfiniteEnergySentinel;
  }

  /// F'(t) for t > 0.
  double derivative_pos(double t) const {
    if (!(t > 0.0)) throw std::domain_error("LocalTerm::derivative_pos: requires t > 0");
    if (variant_ == LocalVariant::entropy && alpha_ * t >= 1.0)
      throw std::domain_error("LocalTerm::derivative_pos: t outside the entropy domain");
    return slope_nonneg(t);
  }

  /// Odd extension of F' to all t, using the one-sided limit F'(0+) at t = 0.
  double slope(double t) const {
    return t < 0.0 ? -slope_nonneg(-t) : slope_nonneg(t);
  }

  /// F''(t) for t > 0.
  double curvature_pos(double t) const {
    switch (variant_) {
      case LocalVariant::quartic: return 12.0 * t * t - 4.0;
      case LocalVariant::vee: return 2.0;
      case LocalVariant::entropy: {
        const double at = alpha_ * t;
        return -2.0 + 2.0 * alpha_ / (beta_ * (1.0 - at * at));
      }
    }
    return 0.0;
  }

  /// Whether F is convex on t > 0. Only the vee term is: the quartic and the
  /// entropy terms both have F''(0+) < 0.
  bool convex_on_positive() const { return variant_ == LocalVariant::vee; }

  /// Positive curvature scale used for preconditioning; F''(1) > 0 for all variants.
  double reference_curvature() const { return curvature_pos(1.0); }

 private:
  LocalTerm(LocalVariant v, double beta) : variant_(v), beta_(beta) {
    if (v == LocalVariant::entropy) {
      alpha_ = std::tanh(beta_);
      mean_field_at_one_ = mean_field(1.0);
    }
  }

  double mean_field(double t) const {
    const double at = alpha_ * t;
    const double ent = (1.0 + at) * std::log1p(at) + (1.0 - at) * std::log1p(-at);
    return -t * t + ent / (alpha_ * beta_);
  }

  double slope_nonneg(double t) const {
    switch (variant_) {
      case LocalVariant::quartic: return 4.0 * t * (t * t - 1.0);
      case LocalVariant::vee: return 2.0 * (t - 1.0);
      case LocalVariant::entropy: {
        if (alpha_ * t >= 1.0) return std::numeric_limits<double>::infinity();
        return -2.0 * t + 2.0 * std::atanh(alpha_ * t) / beta_;
      }
    }
    return 0.0;
  }

  LocalVariant variant_;
  double beta_ = 0.0;
  double alpha_ = 0.0;
  double mean_field_at_one_ = 0.0;
};

struct ConstantBranch {
  double level;   // t0
  double energy;  // F(t0) + t0^2 * integral of v
};

/// Minimizes g(t) = F(t) + t^2 * integral(v) over t >= 0. Golden-section on
/// [0, 1] (g increases past t = 1 for every variant), then the minimizer is
/// polished by bisection on g' so the level is accurate to rounding rather
/// than to sqrt(machine epsilon).
inline ConstantBranch constant_branch(const LocalTerm& term, const MixtureKernel& kernel) {
  const double c = kernel.total_integral();
  auto g = [&](double t) { return term.bounded_value(t) + c * t * t; };
  auto dg = [&](double t) { return term.slope(t) + 2.0 * c * t; };

  const auto coarse = golden_section_minimize(g, 0.0, 1.0, 1e-9);
  double lo = std::max(0.0, coarse.argmin - 1e-4);
  double hi = std::min(1.0, coarse.argmin + 1e-4);
  double t0 = coarse.argmin;
  if (dg(hi) <= 0.0) {
    t0 = hi;
  } else if (dg(lo) >= 0.0) {
    t0 = lo;
  } else {
    t0 = bisect_root(dg, lo, hi, 0.0, 200);
  }
  return {t0, g(t0)};
}

}  // namespace stripemin
