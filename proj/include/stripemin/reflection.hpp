#pragma once

// Profile algebra (reflection, juxtaposition, alternating powers) and numeric
// checks of the reflection-positivity bound and the Dirichlet chessboard
// estimate on discretized profiles.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stripemin/energy.hpp"
#include "stripemin/kernel.hpp"
#include "stripemin/local_term.hpp"
#include "stripemin/profile.hpp"

namespace stripemin {

/// theta f(x) = -f(T - x).
inline Profile reflect(const Profile& f) {
  std::vector<double> v(f.values().rbegin(), f.values().rend());
  for (auto& x : v) x = -x;
  return Profile(f.period(), std::move(v));
}

/// Reflection of a block sequence: reversed order, each block reflected.
inline std::vector<Profile> reflect(const std::vector<Profile>& blocks) {
  std::vector<Profile> out;
  out.reserve(blocks.size());
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) out.push_back(reflect(*it));
  return out;
}

/// Blocks f_{-M+1} .. f_N; blocks before `split` form the left part, the rest
/// the right part. Either part may be empty.
struct ProfileSequence {
  std::vector<Profile> blocks;
  std::size_t split = 0;

  std::vector<Profile> left() const { return {blocks.begin(), blocks.begin() + static_cast<std::ptrdiff_t>(split)}; }
  std::vector<Profile> right() const { return {blocks.begin() + static_cast<std::ptrdiff_t>(split), blocks.end()}; }

  double total_length() const {
    double L = 0.0;
    for (const auto& b : blocks) L += b.period();
    return L;
  }
};

/// Common grid spacing of the blocks; throws if they disagree.
inline double shared_spacing(const std::vector<Profile>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("juxtapose: no blocks");
  const double h = blocks.front().spacing();
  for (const auto& b : blocks)
    if (std::abs(b.spacing() - h) > 1e-9 * h)
      throw std::invalid_argument("juxtapose: blocks must share one grid spacing");
  return h;
}

/// Concatenation of the blocks on [0, sum T_i]; neighbouring blocks share
/// their zero boundary node. No resampling is done.
inline Segment juxtapose(const std::vector<Profile>& blocks) {
  const double h = shared_spacing(blocks);
  Segment s;
  std::size_t cells = 0;
  s.values.push_back(0.0);
  for (const auto& b : blocks) {
    s.values.insert(s.values.end(), b.values().begin(), b.values().end());
    s.values.push_back(0.0);
    cells += b.size() + 1;
  }
  s.length = h * static_cast<double>(cells);
  return s;
}

inline Segment juxtapose(const ProfileSequence& seq) { return juxtapose(seq.blocks); }

/// {f, theta f, f, theta f, ...} with 2^m blocks.
inline std::vector<Profile> alternating_power(const Profile& f, int m) {
  if (m < 0 || m > 20) throw std::invalid_argument("alternating_power: exponent out of range");
  const Profile tf = reflect(f);
  std::vector<Profile> out;
  const std::size_t count = std::size_t{1} << m;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(i % 2 == 0 ? f : tf);
  return out;
}

/// Interaction between `g` on [0, T_g] and `s` placed immediately to its
/// right: 2 * sum_{k in g, l in s} h^2 g_k s_l v(y_l - x_k). Bilinear, so
/// flipping the sign of `s` flips the result exactly.
inline double cross_interaction(const Profile& g, const Profile& s, const MixtureKernel& kernel) {
  const double h = shared_spacing({g, s});
  double total = 0.0;
  for (const auto& c : kernel.components()) {
    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      left += g[i] * std::exp(-c.rate * static_cast<double>(g.size() - i) * h);
    for (std::size_t j = 0; j < s.size(); ++j)
      right += s[j] * std::exp(-c.rate * static_cast<double>(j + 1) * h);
    total += c.weight * left * right;
  }
  return 2.0 * h * h * kernel.strength() * total;
}

struct InequalityCheck {
  double lhs;
  double rhs;
  double margin;  // lhs - rhs
};

/// E^D(phi[F]) against (E^D(phi[F1]) + E^D(phi[F2])) / 2 with
/// F1 = (theta F+, F+), F2 = (F-, theta F-). An empty part contributes zero.
inline InequalityCheck lemma1_check(const ProfileSequence& seq, const MixtureKernel& kernel,
                                    const LocalTerm& term) {
  if (seq.blocks.empty()) throw std::invalid_argument("lemma1_check: empty sequence");
  if (seq.split > seq.blocks.size()) throw std::invalid_argument("lemma1_check: split out of range");
  const double lhs = dirichlet_energy(juxtapose(seq.blocks), kernel, term);

  auto mirrored_energy = [&](std::vector<Profile> first, std::vector<Profile> second) {
    if (first.empty() && second.empty()) return 0.0;
    first.insert(first.end(), second.begin(), second.end());
    return dirichlet_energy(juxtapose(first), kernel, term);
  };
  const auto plus = seq.right(), minus = seq.left();
  const double e1 = plus.empty() ? 0.0 : mirrored_energy(reflect(plus), plus);
  const double e2 = minus.empty() ? 0.0 : mirrored_energy(minus, reflect(minus));
  const double rhs = 0.5 * e1 + 0.5 * e2;
  return {lhs, rhs, lhs - rhs};
}

/// E^D(phi[F]) against sum_i T_i e_inf(|f_i|); every block must be one-signed.
inline InequalityCheck chessboard_check(const std::vector<Profile>& blocks, const MixtureKernel& kernel,
                                        const LocalTerm& term) {
  if (blocks.empty()) throw std::invalid_argument("chessboard_check: empty sequence");
  double rhs = 0.0;
  for (const auto& b : blocks) {
    if (!b.nonnegative() && !b.nonpositive())
      throw std::invalid_argument("chessboard_check: blocks must have constant sign");
    auto mag = b.values();
    for (auto& x : mag) x = std::abs(x);
    rhs += b.period() * per_period_energy(Profile(b.period(), std::move(mag)), kernel, term).total;
  }
  const double lhs = dirichlet_energy(juxtapose(blocks), kernel, term);
  return {lhs, rhs, lhs - rhs};
}

/// Smoothed random piecewise-linear bump on n interior nodes: knots uniform in
/// [0,1] pinned to zero at both ends, three smoothing passes, then scaled to a
/// peak drawn uniformly from [0,1].
template <typename Rng>
std::vector<double> random_bump(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> knot_count(2, 6);
  const int knots = knot_count(rng);
  std::vector<double> kv(knots + 2, 0.0);
  for (int k = 1; k <= knots; ++k) kv[k] = unit(rng);
  std::vector<double> v(n + 2, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n + 1) * (knots + 1);
    const auto k = std::min(static_cast<std::size_t>(s), static_cast<std::size_t>(knots));
    const double frac = s - static_cast<double>(k);
    v[i] = (1.0 - frac) * kv[k] + frac * kv[k + 1];
  }
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<double> w = v;
    for (std::size_t i = 1; i <= n; ++i) w[i] = 0.25 * v[i - 1] + 0.5 * v[i] + 0.25 * v[i + 1];
    v.swap(w);
  }
  const double peak = *std::max_element(v.begin(), v.end());
  const double amp = unit(rng);
  std::vector<double> out(v.begin() + 1, v.end() - 1);
  for (auto& x : out) x = peak > 0.0 ? amp * x / peak : 0.0;
  return out;
}

enum class CheckKind { lemma1, chessboard };

inline std::string_view to_string(CheckKind k) { return k == CheckKind::lemma1 ? "lemma1" : "chessboard"; }

struct CampaignCase {
  unsigned long long seed = 0;
  CheckKind kind = CheckKind::lemma1;
  std::size_t blocks = 0;
  InequalityCheck result{};
  double tolerance = 0.0;
  bool passed = false;
};

struct CampaignSettings {
  double spacing = 0.02;
  std::size_t min_block_points = 10;
  std::size_t max_block_points = 150;
  std::size_t max_blocks = 4;
  double lemma1_tolerance = 1e-10;      // relative to 1 + |lhs|
  double chessboard_tolerance = 1e-8;   // relative to 1 + |lhs|
};

/// One randomized inequality case, fully determined by (seed, kind).
/// Lemma 1 cases draw 2..max_blocks blocks of random sign and a random split;
/// chessboard cases draw 1..max_blocks one-signed blocks.
inline CampaignCase run_campaign_case(unsigned long long seed, CheckKind kind, const MixtureKernel& kernel,
                                      const LocalTerm& term, const CampaignSettings& cs = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> points(cs.min_block_points, cs.max_block_points);
  std::uniform_int_distribution<std::size_t> count(kind == CheckKind::lemma1 ? 2 : 1, cs.max_blocks);
  std::bernoulli_distribution flip(0.5);

  const std::size_t nb = count(rng);
  std::vector<Profile> blocks;
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t n = points(rng);
    auto v = random_bump(rng, n);
    if (flip(rng))
      for (auto& x : v) x = -x;
    blocks.emplace_back(cs.spacing * static_cast<double>(n + 1), std::move(v));
  }

  CampaignCase out;
  out.seed = seed;
  out.kind = kind;
  out.blocks = nb;
  if (kind == CheckKind::lemma1) {
    std::uniform_int_distribution<std::size_t> split(0, nb);
    out.result = lemma1_check({blocks, split(rng)}, kernel, term);
    out.tolerance = cs.lemma1_tolerance * (1.0 + std::abs(out.result.lhs));
  } else {
    out.result = chessboard_check(blocks, kernel, term);
    out.tolerance = cs.chessboard_tolerance * (1.0 + std::abs(out.result.lhs));
  }
  out.passed = out.result.margin >= -out.tolerance;
  return out;
}

}  // namespace stripemin
