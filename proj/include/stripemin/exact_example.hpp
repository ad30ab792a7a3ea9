#pragma once

// Closed-form kink and constant solutions for v(x) = lambda exp(-|x|) with
// F(t) = (|t| - 1)^2, and the coupling at which the kink's excess energy
// changes sign.

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "stripemin/scalar_search.hpp"

namespace stripemin::exact {

struct ConstantSolution {
  double level;            // phi0 = 1 / (1 + 2 lambda)
  double specific_energy;  // 2 lambda / (1 + 2 lambda)
};

inline ConstantSolution constant_solution(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("constant_solution: lambda must be >= 0");
  const double d = 1.0 + 2.0 * lambda;
  return {1.0 / d, 2.0 * lambda / d};
}

/// mu = mu1 + i mu2 = (1 + 2 lambda)^(1/4) exp(i theta / 2),
/// theta = asin(sqrt(2 lambda / (1 + 2 lambda))).
struct KinkParameters {
  double coupling;
  double mu1;
  double mu2;
  double theta;
  double phi0;
};

inline KinkParameters kink_parameters(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("kink_parameters: lambda must be positive");
  const double d = 1.0 + 2.0 * lambda;
  const double theta = std::asin(std::sqrt(2.0 * lambda / d));
  const double modulus = std::pow(d, 0.25);
  return {lambda, modulus * std::cos(0.5 * theta), modulus * std::sin(0.5 * theta), theta, 1.0 / d};
}

/// k-th derivative of phi(x) = phi0 (1 - exp(-mu1 x) cos(mu2 x + theta) / cos theta)
/// for x >= 0, written as phi0 - phi0 / cos(theta) * Re(exp(i theta) exp(z x)),
/// z = -mu1 + i mu2.
inline double kink_derivative(const KinkParameters& p, int order, double x) {
  if (order < 0) throw std::invalid_argument("kink_derivative: negative order");
  const std::complex<double> z(-p.mu1, p.mu2);
  const std::complex<double> wave = std::polar(1.0, p.theta) * std::pow(z, order) * std::exp(z * x);
  const double osc = -p.phi0 / std::cos(p.theta) * wave.real();
  return order == 0 ? p.phi0 + osc : osc;
}

/// Kink profile; odd extension for x < 0.
inline double kink_profile(const KinkParameters& p, double x) {
  return x < 0.0 ? -kink_derivative(p, 0, -x) : kink_derivative(p, 0, x);
}

/// max |-phi'''' + 2 phi'' - (1 + 2 lambda) phi + 1| over the grid, with
/// analytic derivatives.
inline double quartic_ode_residual(const KinkParameters& p, std::span<const double> xs) {
  const double d = 1.0 + 2.0 * p.coupling;
  double worst = 0.0;
  for (double x : xs) {
    if (x < 0.0) throw std::invalid_argument("quartic_ode_residual: x must be >= 0");
    const double r = -kink_derivative(p, 4, x) + 2.0 * kink_derivative(p, 2, x) -
                     d * kink_derivative(p, 0, x) + 1.0;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

/// lambda * integral_0^inf (exp(-|x-y|) - exp(-x-y)) phi(y) dy, by adaptive
/// Gauss-Kronrod on [0, x] and [x, x + 60/mu1] plus the remaining tail in
/// closed form.
inline double half_line_interaction(const KinkParameters& p, double x) {
  using boost::math::quadrature::gauss_kronrod;
  auto kernel = [x](double y) { return std::exp(-std::abs(x - y)) - std::exp(-x - y); };
  auto integrand = [&](double y) { return kernel(y) * kink_derivative(p, 0, y); };
  const double cut = x + 60.0 / p.mu1;
  double err = 0.0;
  double inner = 0.0;
  if (x > 0.0) inner += gauss_kronrod<double, 31>::integrate(integrand, 0.0, x, 15, 1e-14, &err);
  inner += gauss_kronrod<double, 31>::integrate(integrand, x, cut, 15, 1e-14, &err);

  // For y >= cut > x the kernel is exp(-y) (e^x - e^-x) and
  // phi(y) = phi0 - phi0/cos(theta) Re(e^{i theta} e^{z y}).
  const std::complex<double> w(-(1.0 + p.mu1), p.mu2);
  const double plain = std::exp(-cut);
  const double wave = (std::polar(1.0, p.theta) * std::exp(w * cut) / (-w)).real();
  const double sinh2 = std::exp(x) - std::exp(-x);
  const double tail = sinh2 * (p.phi0 * plain - p.phi0 / std::cos(p.theta) * wave);
  return p.coupling * (inner + tail);
}

/// max |-phi'' + phi - 1 + lambda * integral_0^inf (e^{-|x-y|} - e^{-x-y}) phi(y) dy|
/// over the grid (x > 0).
inline double integro_ode_residual(const KinkParameters& p, std::span<const double> xs) {
  double worst = 0.0;
  for (double x : xs) {
    if (!(x > 0.0)) throw std::invalid_argument("integro_ode_residual: x must be positive");
    const double r = -kink_derivative(p, 2, x) + kink_derivative(p, 0, x) - 1.0 + half_line_interaction(p, x);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

/// Excess energy of the kink over the constant solution,
///   2 phi0 integral_0^inf exp(-mu1 x) cos(mu2 x + theta) / cos(theta) dx
///   = 2 phi0 (mu1 cos theta - mu2 sin theta) / ((mu1^2 + mu2^2) cos theta).
inline double energy_difference(double lambda) {
  const auto p = kink_parameters(lambda);
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  return 2.0 * p.phi0 * (p.mu1 * c - p.mu2 * s) / ((p.mu1 * p.mu1 + p.mu2 * p.mu2) * c);
}

/// Root of energy_difference on [0.1, 10] by bisection to 1e-12.
inline double critical_lambda() {
  return bisect_root([](double l) { return energy_difference(l); }, 0.1, 10.0, 1e-12, 200);
}

}  // namespace stripemin::exact
