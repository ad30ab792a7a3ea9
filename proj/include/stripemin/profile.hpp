#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stripemin {

/// A function on [0, T] sampled at the interior nodes x_i = i h, i = 1..n,
/// with h = T / (n + 1) and f(0) = f(T) = 0 implied.
class Profile {
 public:
  Profile(double period, std::vector<double> values) : period_(period), values_(std::move(values)) {
    if (!(period_ > 0.0) || !std::isfinite(period_))
      throw std::invalid_argument("Profile: period must be positive");
    if (values_.empty()) throw std::invalid_argument("Profile: needs at least one interior point");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("Profile: non-finite sample");
  }

  /// Samples `fn` at the interior nodes of an n-point grid on [0, period].
  template <typename Fn>
  static Profile sample(double period, std::size_t n, Fn&& fn) {
    if (n == 0) throw std::invalid_argument("Profile::sample: needs at least one interior point");
    const double h = period / static_cast<double>(n + 1);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = fn(static_cast<double>(i + 1) * h);
    return Profile(period, std::move(v));
  }

  double period() const { return period_; }
  std::size_t size() const { return values_.size(); }
  double spacing() const { return period_ / static_cast<double>(values_.size() + 1); }
  /// Position of interior sample i (0-based).
  double node(std::size_t i) const { return static_cast<double>(i + 1) * spacing(); }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  /// Nonnegative and bounded by one: the clamped admissible set.
  bool in_unit_box() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
  }

  bool nonnegative() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
  }
  bool nonpositive() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v <= 0.0; });
  }

  friend bool operator==(const Profile&, const Profile&) = default;

 private:
  double period_;
  std::vector<double> values_;
};

/// Grid size n with spacing T / (n + 1) no larger than `max_spacing`.
inline std::size_t grid_size_for(double period, double max_spacing, std::size_t min_points = 3) {
  if (!(max_spacing > 0.0)) throw std::invalid_argument("grid_size_for: spacing must be positive");
  const auto cells = static_cast<std::size_t>(std::ceil(period / max_spacing - 1e-9));
  return std::max(min_points, cells > 0 ? cells - 1 : 0);
}

/// A function on [0, L] sampled at all N + 1 nodes x_k = k L / N, endpoints
/// included. Used by the finite-volume energies, where endpoints may be free.
struct Segment {
  double length = 0.0;
  std::vector<double> values;

  std::size_t cells() const { return values.empty() ? 0 : values.size() - 1; }
  double spacing() const { return length / static_cast<double>(cells()); }
};

/// Embeds an interior profile into its segment, zero endpoints included.
inline Segment to_segment(const Profile& p) {
  Segment s{p.period(), {}};
  s.values.reserve(p.size() + 2);
  s.values.push_back(0.0);
  s.values.insert(s.values.end(), p.values().begin(), p.values().end());
  s.values.push_back(0.0);
  return s;
}

/// Componentwise min(f, 1).
inline Profile clamp_above(const Profile& p, double cap = 1.0) {
  auto v = p.values();
  for (auto& x : v) x = std::min(x, cap);
  return Profile(p.period(), std::move(v));
}

}  // namespace stripemin
