#pragma once

// Overlap kernel <s|s_n>: the components of the eigenvector |s> of the
// cradle member S(mu(s)) in the base eigenbasis.
//
// The signed kernel is real once each base vector is re-phased so that its
// anchor coefficient becomes (-1)^n |v_n|, n the 1-based active rank:
//   |s~_n> = (-1)^n e^{i arg v_n} |s_n>.
// All signed quantities below refer to that re-phased basis; rephased_basis()
// returns it in the original coordinates. Frozen levels are left as they are.

#include <cmath>

#include "cradle/secular.hpp"

namespace cradle {

namespace detail {

inline int sign_power(Index k) { return (k % 2 == 0) ? 1 : -1; }

// Signed kernel over the active ranks at point p:
//   (-1)^n |v_n| / (s - s_n) * (sum_m w_m / (s - s_m)^2)^{-1/2} * prod_r (-1)^{theta(s - s_r)}
// with n the 1-based active rank and theta(0) = 0. Scaled by |s - s_origin|
// so the removable singularity at the origin pole is exact.
inline RVector kernel_row(const ActiveSet& a, const SecularPoint& p) {
  const Index k = a.size();
  RVector row(k);
  if (p.infinite) {
    const double scale = 1.0 / std::sqrt(a.total_weight);
    const int outer = sign_power(k);
    for (Index n = 0; n < k; ++n) row(n) = sign_power(n + 1) * outer * a.magnitudes(n) * scale;
    return row;
  }

  const Index o = p.origin;
  const double d_o = p.offset;
  CompensatedSum other_f2;
  int parity = 1;  // product over r != origin of (-1)^theta(s - s_r)
  for_each_descending(a, p, [&](Index m, double d) {
    if (m == o) return;
    other_f2.add(a.weights(m) / (d * d));
    if (d > 0.0) parity = -parity;
  });
  const double den = std::sqrt(a.weights(o) + d_o * d_o * other_f2.value());

  for (Index n = 0; n < k; ++n) {
    const double sign = sign_power(n + 1) * parity;
    if (n == o) {
      // sign(d_o) (-1)^theta(d_o) = -1 on both sides of the pole.
      row(n) = -sign * a.magnitudes(n) / den;
    } else {
      // (-1)^theta(d_o) |d_o| = -d_o.
      row(n) = sign * (-d_o) * a.magnitudes(n) / (p.difference(a, n) * den);
    }
  }
  return row;
}

// Expands an active-rank row to full cradle levels (frozen columns zero).
inline RVector expand_row(const CradleConfig& cradle, const ActiveSet& a, const RVector& active_row) {
  RVector full = RVector::Zero(cradle.dim());
  for (Index j = 0; j < a.size(); ++j) full(a.levels[static_cast<std::size_t>(j)]) = active_row(j);
  return full;
}

}  // namespace detail

struct KernelEvaluation {
  double s = 0.0;
  RVector signed_row;  // <s|s~_n>
  RVector magnitude;   // |<s|s_n>|
};

inline KernelEvaluation evaluate_kernel(const CradleConfig& cradle, double s) {
  const detail::ActiveSet a = detail::active_set(cradle);
  if (a.size() == 0) throw InvalidAnchor("kernel needs at least one active level");
  const RVector row = detail::expand_row(cradle, a, detail::kernel_row(a, detail::nearest_point(a, s)));
  return {s, row, row.cwiseAbs()};
}

inline double overlap_signed(const CradleConfig& cradle, double s, Index n) {
  return evaluate_kernel(cradle, s).signed_row(n);
}

inline double overlap_magnitude(const CradleConfig& cradle, double s, Index n) {
  return std::abs(overlap_signed(cradle, s, n));
}

// Unit factors p_n with |s~_n> = p_n |s_n>.
inline CVector rephasing(const CradleConfig& cradle) {
  CVector phase = CVector::Ones(cradle.dim());
  Index rank = 0;
  for (const Index n : cradle.active_levels()) {
    ++rank;
    const Complex c = cradle.coefficients()(n);
    phase(n) = double(detail::sign_power(rank)) * c / std::abs(c);
  }
  return phase;
}

// Re-phased base eigenvectors |s~_n> as columns, original coordinates.
inline CMatrix rephased_basis(const CradleConfig& cradle) {
  return cradle.base().eigenvectors() * rephasing(cradle).asDiagonal();
}

// Q with Q(n, r) = <s_n(mu)|s~_r>. Rows are the eigenvectors of S(mu) in the
// re-phased base basis; frozen levels keep their unit rows. Q is orthogonal.
inline RMatrix basis_matrix(const CradleConfig& cradle, double mu) {
  const Index n = cradle.dim();
  RMatrix q = RMatrix::Identity(n, n);
  if (mu == 0.0) return q;
  const detail::ActiveSet a = detail::active_set(cradle);
  const double rho = 1.0 / mu;
  for (Index j = 0; j < a.size(); ++j) {
    const detail::SecularPoint p = detail::solve_root(a, rho, j);
    q.row(a.levels[static_cast<std::size_t>(j)]) = detail::expand_row(cradle, a, detail::kernel_row(a, p));
  }
  return q;
}

inline RVector basis_row(const CradleConfig& cradle, double mu, Index n) {
  if (cradle.is_frozen(n) || mu == 0.0) return RVector::Unit(cradle.dim(), n);
  const detail::ActiveSet a = detail::active_set(cradle);
  const auto it = std::find(a.levels.begin(), a.levels.end(), n);
  const Index rank = Index(it - a.levels.begin());
  return detail::expand_row(cradle, a, detail::kernel_row(a, detail::solve_root(a, 1.0 / mu, rank)));
}

// Eigenvectors of S + mu |v><v| as columns, original coordinates, in the
// kernel's phase convention.
inline CMatrix eigenvectors_at(const CradleConfig& cradle, double mu) {
  return rephased_basis(cradle) * basis_matrix(cradle, mu).transpose().cast<Complex>();
}

}  // namespace cradle
