#pragma once

// Secular-equation machinery for the Hermitian cradle S(mu) = S + mu |v><v|.
//
// Every eigenvalue s of S(mu) that does not belong to a frozen level solves
//
//     f(s) := sum_m |v_m|^2 / (s - s_m) = 1 / mu,
//
// and f is strictly decreasing between consecutive active poles s_m. Roots
// are carried as (nearest pole, offset) pairs so differences s - s_m near a
// pole keep full relative accuracy.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "cradle/spectra.hpp"

namespace cradle {

namespace detail {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// The non-frozen part of a cradle, indexed by active rank.
struct ActiveSet {
  std::vector<Index> levels;  // full-cradle level of each active rank
  RVector poles;              // ascending
  RVector weights;            // |v_m|^2
  RVector magnitudes;         // |v_m|
  double total_weight = 0.0;

  Index size() const { return poles.size(); }

  // s_origin - s_m, exact when m == origin.
  double separation(Index origin, Index m) const { return poles(origin) - poles(m); }
};

inline ActiveSet active_set(const CradleConfig& cradle) {
  ActiveSet a;
  a.levels = cradle.active_levels();
  const Index k = static_cast<Index>(a.levels.size());
  a.poles.resize(k);
  a.weights.resize(k);
  a.magnitudes.resize(k);
  CompensatedSum total;
  for (Index j = 0; j < k; ++j) {
    const Index n = a.levels[static_cast<std::size_t>(j)];
    a.poles(j) = cradle.base().eigenvalue(n);
    a.weights(j) = cradle.weights()(n);
    a.magnitudes(j) = cradle.magnitudes()(n);
    total.add(a.weights(j));
  }
  a.total_weight = total.value();
  return a;
}

// A point on the real line expressed relative to an active pole.
struct SecularPoint {
  Index origin = 0;
  double offset = 0.0;
  bool infinite = false;  // the level that escapes to +infinity

  double value(const ActiveSet& a) const {
    return infinite ? std::numeric_limits<double>::infinity() : a.poles(origin) + offset;
  }
  // s - s_m
  double difference(const ActiveSet& a, Index m) const {
    return m == origin ? offset : a.separation(origin, m) + offset;
  }
};

inline SecularPoint nearest_point(const ActiveSet& a, double s) {
  const auto* begin = a.poles.data();
  const auto* end = begin + a.size();
  const auto* it = std::lower_bound(begin, end, s);
  Index origin;
  if (it == begin)
    origin = 0;
  else if (it == end)
    origin = a.size() - 1;
  else
    origin = (s - *(it - 1) <= *it - s) ? Index(it - begin - 1) : Index(it - begin);
  return SecularPoint{origin, s - a.poles(origin), false};
}

// Visits active ranks in order of descending |s - s_m|, ending at the origin.
template <typename Visitor>
void for_each_descending(const ActiveSet& a, const SecularPoint& p, Visitor&& visit) {
  Index lo = 0;
  Index hi = a.size() - 1;
  while (lo <= hi) {
    const double dlo = p.difference(a, lo);
    const double dhi = p.difference(a, hi);
    if (std::abs(dlo) >= std::abs(dhi)) {
      visit(lo, dlo);
      ++lo;
    } else {
      visit(hi, dhi);
      --hi;
    }
  }
}

struct SecularSums {
  double f = 0.0;          // sum w/d
  double f_prime = 0.0;    // sum w/d^2, equals -f'(s)
  double magnitude = 0.0;  // sum |w/d|, the cancellation scale of f
};

inline SecularSums secular_sums(const ActiveSet& a, const SecularPoint& p) {
  CompensatedSum f;
  CompensatedSum f2;
  double mag = 0.0;
  for_each_descending(a, p, [&](Index m, double d) {
    const double t = a.weights(m) / d;
    f.add(t);
    f2.add(t / d);
    mag += std::abs(t);
  });
  return {f.value(), f2.value(), mag};
}

// ds/dmu at a point, written so that it stays finite at the origin pole:
// (w_o + d_o A)^2 / (w_o + d_o^2 B) with A, B the sums over the other poles.
inline double velocity_at_point(const ActiveSet& a, const SecularPoint& p) {
  if (p.infinite) return a.total_weight;
  CompensatedSum other_f;
  CompensatedSum other_f2;
  for_each_descending(a, p, [&](Index m, double d) {
    if (m == p.origin) return;
    const double t = a.weights(m) / d;
    other_f.add(t);
    other_f2.add(t / d);
  });
  const double d = p.offset;
  const double w = a.weights(p.origin);
  const double num = w + d * other_f.value();
  const double den = w + d * d * other_f2.value();
  return num * num / den;
}

// Next trial point inside an open bracket (lo, hi) that excludes zero.
// Brackets spanning many decades shrink geometrically.
inline double split_bracket(double lo, double hi) {
  if (lo == 0.0) return hi * 0.125;
  if (hi == 0.0) return lo * 0.125;
  if (lo > 0.0 && hi > 8.0 * lo) return std::sqrt(lo * hi);
  if (hi < 0.0 && lo < 8.0 * hi) return -std::sqrt(lo * hi);
  return lo + 0.5 * (hi - lo);
}

// Root of g(t) = f(s_origin + t) - rho inside (lo, hi), where g is
// decreasing, positive near lo and negative near hi. Bisection to a
// thousandth of the bracket, then safeguarded Newton.
inline SecularPoint refine_root(const ActiveSet& a, double rho, Index origin, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  SecularPoint p{origin, 0.0, false};
  auto g_at = [&](double t) {
    p.offset = t;
    return secular_sums(a, p);
  };

  const double coarse = 1e-3 * (hi - lo);
  while (hi - lo > coarse) {
    const double t = split_bracket(lo, hi);
    const double g = g_at(t).f - rho;
    if (g > 0.0)
      lo = t;
    else if (g < 0.0)
      hi = t;
    else
      return SecularPoint{origin, t, false};
  }

  double t = split_bracket(lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const SecularSums s = g_at(t);
    const double g = s.f - rho;
    if (g == 0.0) break;
    if (g > 0.0)
      lo = t;
    else
      hi = t;
    double next = t + g / s.f_prime;
    if (!(next > lo && next < hi)) next = split_bracket(lo, hi);
    const double step = std::abs(next - t);
    t = next;
    if (step <= 2.0 * eps * std::abs(t)) break;
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
  }
  return SecularPoint{origin, t, false};
}

// Root in the open interval between consecutive active poles j and j + 1.
inline SecularPoint root_between(const ActiveSet& a, double rho, Index j) {
  const double gap = a.poles(j + 1) - a.poles(j);
  const double half = 0.5 * gap;
  const double g_mid = secular_sums(a, SecularPoint{j, half, false}).f - rho;
  if (g_mid == 0.0) return SecularPoint{j, half, false};
  if (g_mid < 0.0) return refine_root(a, rho, j, 0.0, half);
  return refine_root(a, rho, j + 1, -(gap - half), 0.0);
}

// Root of rank j (0-based over the active set) of f(s) = rho.
// rho > 0: roots sit in (p_j, p_{j+1}) and the last in (p_K, p_K + W/rho].
// rho < 0: roots sit in (p_{j-1}, p_j) and the first in [p_1 + W/rho, p_1).
// rho = 0: the asymptotes, with the top level at +infinity.
inline SecularPoint solve_root(const ActiveSet& a, double rho, Index j) {
  const Index k = a.size();
  const double w = a.total_weight;
  if (rho > 0.0) {
    if (j + 1 < k) return root_between(a, rho, j);
    if (k == 1) return SecularPoint{0, w / rho, false};
    return refine_root(a, rho, k - 1, 0.0, w / rho);
  }
  if (rho < 0.0) {
    if (j > 0) return root_between(a, rho, j - 1);
    if (k == 1) return SecularPoint{0, w / rho, false};
    return refine_root(a, rho, 0, w / rho, 0.0);
  }
  if (j + 1 < k) return root_between(a, 0.0, j);
  return SecularPoint{k - 1, 0.0, true};
}

inline std::vector<SecularPoint> solve_all(const ActiveSet& a, double rho) {
  std::vector<SecularPoint> out;
  out.reserve(static_cast<std::size_t>(a.size()));
  for (Index j = 0; j < a.size(); ++j) out.push_back(solve_root(a, rho, j));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct MuAtS {
  ExtendedReal mu;
  bool at_pole = false;  // s is an unperturbed eigenvalue; mu = 0
  Index pole = -1;       // the level whose eigenvalue equals s
};

// The unique weight mu for which s is an eigenvalue of S + mu |v><v|.
// Exact zeros of the secular sum (the asymptotes) map to the +infinity
// sentinel, the point where the cradle closes up.
inline MuAtS mu_of_s(const CradleConfig& cradle, double s) {
  const detail::ActiveSet a = detail::active_set(cradle);
  if (a.size() == 0) return {ExtendedReal::positive_infinity(), false, -1};
  const detail::SecularPoint p = detail::nearest_point(a, s);
  if (p.offset == 0.0) return {ExtendedReal(0.0), true, a.levels[static_cast<std::size_t>(p.origin)]};
  const detail::SecularSums sums = detail::secular_sums(a, p);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(sums.f) <= 4.0 * eps * sums.magnitude) return {ExtendedReal::positive_infinity(), false, -1};
  return {ExtendedReal(1.0 / sums.f), false, -1};
}

// The interlaced limits s*_n of the active levels as mu -> +infinity.
struct Asymptotes {
  RVector values;  // ascending, one fewer than the active levels

  Index size() const { return values.size(); }
  // s*_{n-1} for active rank n, with -infinity below the first.
  ExtendedReal lower(Index n) const {
    return n == 0 ? ExtendedReal::negative_infinity() : ExtendedReal(values(n - 1));
  }
  // s*_n for active rank n, with +infinity above the last.
  ExtendedReal upper(Index n) const {
    return n == values.size() ? ExtendedReal::positive_infinity() : ExtendedReal(values(n));
  }
};

inline Asymptotes asymptotes(const CradleConfig& cradle) {
  const detail::ActiveSet a = detail::active_set(cradle);
  Asymptotes out;
  out.values.resize(std::max<Index>(a.size() - 1, 0));
  for (Index j = 0; j + 1 < a.size(); ++j) out.values(j) = detail::solve_root(a, 0.0, j).value(a);
  return out;
}

// Eigenvalues of S + mu |v><v| labelled by the level they started from.
// Frozen levels stay put; without frozen levels the result is ascending.
inline RVector eigenvalues_at(const CradleConfig& cradle, double mu) {
  RVector out = cradle.base().eigenvalues();
  if (mu == 0.0) return out;
  const detail::ActiveSet a = detail::active_set(cradle);
  const double rho = 1.0 / mu;
  for (Index j = 0; j < a.size(); ++j)
    out(a.levels[static_cast<std::size_t>(j)]) = detail::solve_root(a, rho, j).value(a);
  return out;
}

// ds/dmu for the eigenvalue passing through s. At an unperturbed
// eigenvalue s_n this is |v_n|^2.
inline double velocity_at(const CradleConfig& cradle, double s) {
  const detail::ActiveSet a = detail::active_set(cradle);
  if (a.size() == 0) return 0.0;
  return detail::velocity_at_point(a, detail::nearest_point(a, s));
}

// ds_n/dmu for every level at weight mu; frozen levels have velocity zero.
inline RVector velocities_at(const CradleConfig& cradle, double mu) {
  if (mu == 0.0) return cradle.weights();
  RVector out = RVector::Zero(cradle.dim());
  const detail::ActiveSet a = detail::active_set(cradle);
  const double rho = 1.0 / mu;
  for (Index j = 0; j < a.size(); ++j)
    out(a.levels[static_cast<std::size_t>(j)]) =
        detail::velocity_at_point(a, detail::solve_root(a, rho, j));
  return out;
}

// ---------------------------------------------------------------------------

struct Trajectory {
  std::vector<double> mu;
  std::vector<RVector> eigenvalues;
  std::vector<RVector> velocities;

  std::size_t size() const { return mu.size(); }
};

inline Trajectory trace(const CradleConfig& cradle, const std::vector<double>& mu_grid) {
  Trajectory t;
  t.mu = mu_grid;
  t.eigenvalues.reserve(mu_grid.size());
  t.velocities.reserve(mu_grid.size());
  for (const double mu : mu_grid) {
    t.eigenvalues.push_back(eigenvalues_at(cradle, mu));
    t.velocities.push_back(velocities_at(cradle, mu));
  }
  return t;
}

// Eigenvalues of S with row and column r deleted, obtained as the
// asymptotes of the cradle anchored at the basis vector e_r. Levels whose
// eigenvector has no weight on e_r survive the deletion unchanged.
inline RVector interlace_by_deletion(const HermitianOperator& s, Index r) {
  if (r < 0 || r >= s.dim()) throw InputError("deleted index out of range");
  const CradleConfig cradle = make_cradle(eigendecompose(s), CVector::Unit(s.dim(), r));
  const Asymptotes stars = asymptotes(cradle);
  std::vector<double> values(stars.values.data(), stars.values.data() + stars.size());
  for (const Index m : cradle.frozen_levels()) values.push_back(cradle.base().eigenvalue(m));
  std::sort(values.begin(), values.end());
  return Eigen::Map<const RVector>(values.data(), static_cast<Index>(values.size()));
}

// ---------------------------------------------------------------------------
// Level repulsion

struct PairReport {
  Index lower = 0;
  Index upper = 0;
  double min_gap = 0.0;  // min over the grid of |s_upper(mu) - s_lower(mu)|
  bool crossed = false;
};

struct CrossingEvent {
  Index moving = 0;  // the active level that passes
  Index frozen = 0;  // the level being passed
  double mu_before = 0.0;
  double mu_after = 0.0;
};

// Where an active level reaches a frozen eigenvalue s_m: mu = 1/f_active(s_m).
struct PredictedCrossing {
  Index frozen = 0;
  Index moving = 0;
  ExtendedReal mu;
};

struct RepulsionReport {
  std::vector<PairReport> adjacent;
  std::vector<CrossingEvent> crossings;
  std::vector<PredictedCrossing> predicted;
};

inline std::vector<PredictedCrossing> predict_crossings(const CradleConfig& cradle) {
  std::vector<PredictedCrossing> out;
  const detail::ActiveSet a = detail::active_set(cradle);
  if (a.size() == 0) return out;
  for (const Index m : cradle.frozen_levels()) {
    const double s = cradle.base().eigenvalue(m);
    const MuAtS at = mu_of_s(cradle, s);
    if (at.at_pole || at.mu.is_infinite()) continue;
    const double mu = at.mu.value();
    // Active levels move right for mu > 0, so the one arriving from below.
    const auto* begin = a.poles.data();
    const Index above = Index(std::upper_bound(begin, begin + a.size(), s) - begin);
    const Index rank = mu > 0.0 ? above - 1 : above;
    if (rank < 0 || rank >= a.size()) continue;
    out.push_back({m, a.levels[static_cast<std::size_t>(rank)], ExtendedReal(mu)});
  }
  return out;
}

inline RepulsionReport detect_level_repulsion(const CradleConfig& cradle,
                                              const std::vector<double>& mu_grid) {
  RepulsionReport report;
  report.predicted = predict_crossings(cradle);
  const Index n = cradle.dim();
  std::vector<RVector> path;
  path.reserve(mu_grid.size());
  for (const double mu : mu_grid) path.push_back(eigenvalues_at(cradle, mu));

  for (Index k = 0; k + 1 < n; ++k) {
    PairReport pr{k, k + 1, std::numeric_limits<double>::infinity(), false};
    for (const RVector& s : path) pr.min_gap = std::min(pr.min_gap, std::abs(s(k + 1) - s(k)));
    report.adjacent.push_back(pr);
  }

  for (Index lo = 0; lo < n; ++lo) {
    for (Index hi = lo + 1; hi < n; ++hi) {
      if (cradle.is_frozen(lo) == cradle.is_frozen(hi)) continue;
      int last_sign = 0;
      double last_mu = 0.0;
      for (std::size_t g = 0; g < path.size(); ++g) {
        const double diff = path[g](hi) - path[g](lo);
        const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) {
          const Index moving = cradle.is_frozen(lo) ? hi : lo;
          const Index frozen = cradle.is_frozen(lo) ? lo : hi;
          report.crossings.push_back({moving, frozen, last_mu, mu_grid[g]});
          if (hi == lo + 1) report.adjacent[static_cast<std::size_t>(lo)].crossed = true;
        }
        last_sign = sign;
        last_mu = mu_grid[g];
      }
    }
  }
  return report;
}

}  // namespace cradle
