#pragma once

// Unitary cradles U(alpha) = (1 + (e^{i alpha} - 1)|w><w|) U and their Cayley
// link to Hermitian cradles S + mu |v><v|.
//
// With S = -i (U + 1)(U - 1)^{-1}, the two families share eigenvectors and
// u = (s - i)/(s + i). Counterclockwise order of the u_n starting from 1 is
// ascending order of the s_n. Throughout,
//
//     A = sum_m |w_m|^2 (s_m^2 + 1) = 4 N_v^2,   B = sum_m |w_m|^2 s_m,
//     mu(alpha) = A / (cot(alpha/2) - B),        alpha* = 2 arccot(B).

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "cradle/kernel.hpp"
#include "cradle/secular.hpp"

namespace cradle {

inline Complex mobius(double s) { return (s - kI) / (s + kI); }

// Inverse Moebius map i(1 + u)/(1 - u), real for u on the unit circle.
inline double inverse_mobius(Complex u) { return (kI * (1.0 + u) / (1.0 - u)).real(); }

// arg((s - i)/(s + i)) in (0, 2 pi); +infinity maps to 2 pi.
inline double phase_of(double s) {
  if (std::isinf(s)) return s > 0 ? kTwoPi : 0.0;
  return 2.0 * std::atan2(1.0, -s);
}

inline double wrap_phase(double phi) {
  double p = std::fmod(phi, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  if (p >= kTwoPi) p -= kTwoPi;
  return p;
}

// U = (S - i)(S + i)^{-1}, assembled from the spectral decomposition of S.
inline UnitaryOperator cayley_to_unitary(const HermitianOperator& s) {
  const Eigensystem es = dense_eigensystem(s);
  CVector u(es.values.size());
  for (Index n = 0; n < u.size(); ++n) u(n) = mobius(es.values(n));
  return UnitaryOperator(CMatrix(es.vectors * u.asDiagonal() * es.vectors.adjoint()));
}

// S = -i (U + 1)(U - 1)^{-1}. Requires every eigenvalue of U to stay at
// least 1e-10 away from 1.
inline HermitianOperator cayley_to_hermitian(const UnitaryOperator& u) {
  const Index n = u.dim();
  const CMatrix shifted = u.matrix() - CMatrix::Identity(n, n);
  const Eigen::JacobiSVD<CMatrix> svd(shifted);
  const double gap = svd.singularValues()(n - 1);
  if (gap < 1e-10)
    throw CayleySingular("unitary has an eigenvalue within " + std::to_string(gap) + " of 1");
  const CMatrix plus = u.matrix() + CMatrix::Identity(n, n);
  const CMatrix s = -kI * shifted.partialPivLu().solve(plus);
  return HermitianOperator::hermitian_part(s);
}

struct AnchorMap {
  CVector vector;        // |v> in the original basis
  CVector coefficients;  // v_n = <s_n|v>
};

class UnitaryCradle {
 public:
  const UnitaryOperator& base() const { return base_; }
  const CVector& anchor() const { return anchor_; }
  Index dim() const { return base_.dim(); }

  // The Hermitian cradle obtained through the Cayley transform.
  const CradleConfig& linked() const { return linked_; }
  const RVector& hermitian_eigenvalues() const { return linked_.base().eigenvalues(); }

  const CVector& w_coefficients() const { return w_coeffs_; }
  // Base eigenphases in (0, 2 pi), ascending.
  const RVector& phases() const { return phases_; }
  Complex eigenvalue(Index n) const { return std::polar(1.0, phases_(n)); }

  double weight_sum() const { return a_; }        // A
  double shift() const { return b_; }             // B
  double normalization() const { return 0.5 * std::sqrt(a_); }  // N_v
  double alpha_star() const { return alpha_star_; }

  bool is_frozen(Index n) const { return linked_.is_frozen(n); }

  friend UnitaryCradle make_unitary_cradle(const UnitaryOperator& u, const CVector& w);

 private:
  UnitaryCradle(UnitaryOperator base, CVector anchor, CradleConfig linked, CVector w_coeffs, double a,
                double b)
      : base_(std::move(base)),
        anchor_(std::move(anchor)),
        linked_(std::move(linked)),
        w_coeffs_(std::move(w_coeffs)),
        a_(a),
        b_(b),
        alpha_star_(2.0 * std::atan2(1.0, b)) {
    phases_.resize(linked_.dim());
    for (Index n = 0; n < linked_.dim(); ++n) phases_(n) = phase_of(linked_.base().eigenvalue(n));
  }

  UnitaryOperator base_;
  CVector anchor_;
  CradleConfig linked_;
  CVector w_coeffs_;
  RVector phases_;
  double a_;
  double b_;
  double alpha_star_;
};

// v_n = (s_n + i) w_n / (i sqrt(A)).
inline CVector v_from_w(const RVector& s, const CVector& w) {
  double a = 0.0;
  for (Index m = 0; m < s.size(); ++m) a += std::norm(w(m)) * (s(m) * s(m) + 1.0);
  CVector v(s.size());
  for (Index n = 0; n < s.size(); ++n) v(n) = (s(n) + kI) * w(n) / (kI * std::sqrt(a));
  return v;
}

// w_m = i v_m / ((s_m + i) sqrt(sum_k |v_k|^2 / (s_k^2 + 1))).
inline CVector w_from_v(const RVector& s, const CVector& v) {
  double c = 0.0;
  for (Index k = 0; k < s.size(); ++k) c += std::norm(v(k)) / (s(k) * s(k) + 1.0);
  CVector w(s.size());
  for (Index m = 0; m < s.size(); ++m) w(m) = kI * v(m) / ((s(m) + kI) * std::sqrt(c));
  return w;
}

inline UnitaryCradle make_unitary_cradle(const UnitaryOperator& u, const CVector& w) {
  if (w.size() != u.dim()) throw InvalidAnchor("anchor dimension does not match the unitary");
  if (!(std::abs(w.norm() - 1.0) <= 1e-12))
    throw InvalidAnchor("anchor vector must be normalized, |w| = " + std::to_string(w.norm()));
  SpectralDecomposition base = eigendecompose(cayley_to_hermitian(u));
  const RVector& s = base.eigenvalues();
  const CVector w_coeffs = base.eigenvectors().adjoint() * w;
  double a = 0.0;
  double b = 0.0;
  for (Index m = 0; m < s.size(); ++m) {
    a += std::norm(w_coeffs(m)) * (s(m) * s(m) + 1.0);
    b += std::norm(w_coeffs(m)) * s(m);
  }
  CVector v = v_from_w(s, w_coeffs);
  v /= v.norm();
  CradleConfig linked = CradleConfig::from_coefficients(std::move(base), std::move(v));
  return UnitaryCradle(u, w, std::move(linked), w_coeffs, a, b);
}

// |v> in terms of |w>: v = (2/sqrt(A)) (1 - U)^{-1} w, evaluated in
// the shared eigenbasis.
inline AnchorMap anchor_v_from_w(const UnitaryCradle& uc) {
  const CVector coeffs = v_from_w(uc.hermitian_eigenvalues(), uc.w_coefficients());
  return {uc.linked().base().eigenvectors() * coeffs, coeffs};
}

inline UnitaryOperator u_of_alpha(const UnitaryCradle& uc, double alpha) {
  if (alpha == 0.0) return uc.base();
  const CVector& w = uc.anchor();
  const Index n = uc.dim();
  const CMatrix left = CMatrix::Identity(n, n) + (std::exp(kI * alpha) - 1.0) * w * w.adjoint();
  return UnitaryOperator(CMatrix(left * uc.base().matrix()));
}

namespace detail {

// 1/mu(alpha) = (cos(alpha/2) - B sin(alpha/2)) / (A sin(alpha/2)), finite
// for alpha != 0; zero at alpha*.
struct AlphaParameters {
  double half_sin = 0.0;
  double denominator = 0.0;  // cos(alpha/2) - B sin(alpha/2)
  bool at_star = false;
};

inline AlphaParameters alpha_parameters(const UnitaryCradle& uc, double alpha) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double half = 0.5 * wrap_phase(alpha);
  const double c = std::cos(half);
  const double s = std::sin(half);
  const double den = c - uc.shift() * s;
  AlphaParameters p{s, den, std::abs(den) <= 4.0 * eps * (std::abs(c) + std::abs(uc.shift() * s))};
  return p;
}

// Hermitian root carrying unitary level n at angle alpha.
inline SecularPoint unitary_level_point(const UnitaryCradle& uc, const ActiveSet& a,
                                        const AlphaParameters& p, Index rank) {
  const Index k = a.size();
  if (p.at_star) return solve_root(a, 0.0, rank);
  const double rho = p.denominator / (uc.weight_sum() * p.half_sin);
  if (rho > 0.0) return solve_root(a, rho, rank);
  // Past alpha* every level has moved one slot counterclockwise.
  return solve_root(a, rho, (rank + 1) % k);
}

}  // namespace detail

// mu(alpha) = A sin(alpha/2) / (cos(alpha/2) - B sin(alpha/2)); +infinity at alpha*.
inline ExtendedReal mu_of_alpha(const UnitaryCradle& uc, double alpha) {
  const double a = wrap_phase(alpha);
  if (a == 0.0) return ExtendedReal(0.0);
  const detail::AlphaParameters p = detail::alpha_parameters(uc, a);
  if (p.at_star) return ExtendedReal::positive_infinity();
  return ExtendedReal(uc.weight_sum() * p.half_sin / p.denominator);
}

// alpha(mu) = 2 arccot(A/mu + B) in [0, 2 pi).
inline double alpha_of_mu(const UnitaryCradle& uc, ExtendedReal mu) {
  if (mu.is_infinite()) return uc.alpha_star();
  const double m = mu.value();
  if (m == 0.0) return 0.0;
  const double sign = m > 0.0 ? 1.0 : -1.0;
  return wrap_phase(2.0 * std::atan2(std::abs(m), sign * (uc.weight_sum() + uc.shift() * m)));
}

inline double alpha_of_mu(const UnitaryCradle& uc, double mu) { return alpha_of_mu(uc, ExtendedReal(mu)); }

// Eigenphases of U(alpha) in [0, 2 pi), labelled by the base level they
// started from. Solved through the integrated velocity equation, i.e. the
// Hermitian secular equation at 1/mu(alpha).
inline RVector eigenphases_at(const UnitaryCradle& uc, double alpha) {
  RVector out = uc.phases();
  const double a = wrap_phase(alpha);
  if (a == 0.0) return out;
  const detail::ActiveSet act = detail::active_set(uc.linked());
  const detail::AlphaParameters p = detail::alpha_parameters(uc, a);
  for (Index j = 0; j < act.size(); ++j) {
    const detail::SecularPoint pt = detail::unitary_level_point(uc, act, p, j);
    out(act.levels[static_cast<std::size_t>(j)]) = wrap_phase(phase_of(pt.value(act)));
  }
  return out;
}

// Counterclockwise distance travelled by each eigenphase since alpha = 0.
inline RVector phase_advance(const UnitaryCradle& uc, double alpha) {
  const RVector now = eigenphases_at(uc, alpha);
  RVector out(now.size());
  for (Index n = 0; n < now.size(); ++n) out(n) = wrap_phase(now(n) - uc.phases()(n));
  return out;
}

// |<u_n(alpha)|w>|^2, the angular speed d(arg u_n)/d alpha.
inline double angular_velocity(const UnitaryCradle& uc, Index n, double alpha) {
  if (uc.is_frozen(n)) return 0.0;
  const double a = wrap_phase(alpha);
  if (a == 0.0) return std::norm(uc.w_coefficients()(n));
  const detail::ActiveSet act = detail::active_set(uc.linked());
  const auto it = std::find(act.levels.begin(), act.levels.end(), n);
  const Index rank = Index(it - act.levels.begin());
  const detail::AlphaParameters p = detail::alpha_parameters(uc, a);
  const detail::SecularPoint pt = detail::unitary_level_point(uc, act, p, rank);
  const double big_a = uc.weight_sum();

  if (!p.at_star && std::abs(p.denominator) >= std::abs(p.half_sin)) {
    // Near alpha = 0: chain rule through mu, ds/dalpha = (ds/dmu) A / (2 den^2).
    const double s = pt.value(act);
    return detail::velocity_at_point(act, pt) * big_a / ((s * s + 1.0) * p.denominator * p.denominator);
  }
  // Elsewhere: 1 / (sin^2(alpha/2) A (s^2 + 1) sum_m |v_m|^2/(s - s_m)^2).
  if (pt.infinite) return 1.0 / (p.half_sin * p.half_sin * big_a * act.total_weight);
  const double s = pt.value(act);
  detail::CompensatedSum f2;
  detail::for_each_descending(act, pt, [&](Index m, double d) {
    const double r = (s * s + 1.0) / (d * d);
    f2.add(act.weights(m) * r);
  });
  return 1.0 / (p.half_sin * p.half_sin * big_a * f2.value());
}

// du_n/dalpha = i |<u_n(alpha)|w>|^2 u_n(alpha).
inline Complex complex_velocity(const UnitaryCradle& uc, Index n, double alpha) {
  const Complex u = std::polar(1.0, eigenphases_at(uc, alpha)(n));
  return kI * angular_velocity(uc, n, alpha) * u;
}

}  // namespace cradle
