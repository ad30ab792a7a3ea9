#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace stripemin {

struct ScalarMinimum {
  double argmin;
  double value;
};

/// Golden-section search for a unimodal f on [lo, hi]. Stops when the
/// bracket is narrower than `tolerance` or after `max_iterations` shrinks.
/// Ties go to the left point, so a flat region resolves toward `lo`.
template <typename Fn>
ScalarMinimum golden_section_minimize(Fn&& f, double lo, double hi, double tolerance,
                                      int max_iterations = 200) {
  if (!(hi >= lo)) throw std::invalid_argument("golden_section_minimize: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iterations && (b - a) > tolerance; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // The endpoints may beat both interior probes when the minimum sits on the
  // boundary of [lo, hi].
  ScalarMinimum best = fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
  for (double e : {a, b}) {
    const double fe = f(e);
    if (fe < best.value) best = {e, fe};
  }
  return best;
}

/// Bisection for a sign change of g on [lo, hi]. Returns the midpoint of the
/// final bracket; throws if g(lo) and g(hi) have the same strict sign.
template <typename Fn>
double bisect_root(Fn&& g, double lo, double hi, double tolerance, int max_iterations = 200) {
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0.0) == (ghi > 0.0))
    throw std::runtime_error("bisect_root: no sign change in bracket");
  for (int it = 0; it < max_iterations && (hi - lo) > tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace stripemin
