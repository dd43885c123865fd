#pragma once

// Finite sampling on eigenvalue lattices.
//
// A vector |f> is read as the function f(s) = <s|f>, where |s> is the
// eigenvector of the cradle member whose spectrum contains s. Its values on
// the lattice {s_n(mu)} are its coefficients in the eigenbasis of S(mu), so
// any one lattice determines f everywhere.
//
// Coefficients c_n = <s~_n|f> are taken in the kernel's re-phased basis,
// where the kernel is real. Real c gives a real signal; complex c is carried
// as two real channels.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cradle/kernel.hpp"
#include "cradle/secular.hpp"

namespace cradle {

namespace detail {

inline void require_unfrozen(const CradleConfig& cradle) {
  if (cradle.has_frozen())
    throw InvalidAnchor("sampling needs an anchor with no frozen levels");
}

}  // namespace detail

// c_n = <s~_n|f> for f in original coordinates.
inline CVector kernel_coefficients(const CradleConfig& cradle, const CVector& f) {
  if (f.size() != cradle.dim()) throw InputError("signal vector has the wrong dimension");
  return rephased_basis(cradle).adjoint() * f;
}

// Vector in original coordinates with coefficients c.
inline CVector from_kernel_coefficients(const CradleConfig& cradle, const CVector& c) {
  return rephased_basis(cradle) * c;
}

inline double evaluate(const CradleConfig& cradle, const RVector& coefficients, double s) {
  detail::require_unfrozen(cradle);
  if (coefficients.size() != cradle.dim()) throw InputError("coefficient vector has the wrong dimension");
  return evaluate_kernel(cradle, s).signed_row.dot(coefficients);
}

// f(s) for an arbitrary vector in original coordinates, real and imaginary
// channels combined.
inline Complex evaluate(const CradleConfig& cradle, const CVector& f, double s) {
  const CVector c = kernel_coefficients(cradle, f);
  return {evaluate(cradle, RVector(c.real()), s), evaluate(cradle, RVector(c.imag()), s)};
}

struct SampledSignal {
  double mu = 0.0;
  RVector nodes;       // s_n(mu), ascending
  RVector amplitudes;  // f(s_n(mu))
};

inline SampledSignal sample(const CradleConfig& cradle, const RVector& coefficients, double mu) {
  detail::require_unfrozen(cradle);
  if (coefficients.size() != cradle.dim()) throw InputError("coefficient vector has the wrong dimension");
  SampledSignal sig;
  sig.mu = mu;
  sig.nodes = eigenvalues_at(cradle, mu);
  // The lattice values are the coefficients in the eigenbasis of S(mu).
  sig.amplitudes = basis_matrix(cradle, mu) * coefficients;
  return sig;
}

// Real and imaginary channels of an arbitrary vector.
inline std::array<SampledSignal, 2> sample(const CradleConfig& cradle, const CVector& f, double mu) {
  const CVector c = kernel_coefficients(cradle, f);
  return {sample(cradle, RVector(c.real()), mu), sample(cradle, RVector(c.imag()), mu)};
}

// Checks a signal read from elsewhere against the lattice of `cradle`;
// nodes must agree within tol (1 + |s|).
inline void validate_signal(const CradleConfig& cradle, const SampledSignal& sig, double tol = 1e-12) {
  if (!(tol > 0.0)) throw InputError("node tolerance must be positive");
  if (sig.nodes.size() != cradle.dim() || sig.amplitudes.size() != cradle.dim())
    throw InputError("signal size does not match the cradle dimension");
  const RVector expected = eigenvalues_at(cradle, sig.mu);
  for (Index n = 0; n < cradle.dim(); ++n) {
    if (std::abs(sig.nodes(n) - expected(n)) > tol * (1.0 + std::abs(expected(n))))
      throw InputError("signal node " + std::to_string(n + 1) + " is not on the lattice of S(mu)");
  }
}

// Coefficients c recovered from lattice values, c = Q^T f(s_n(mu)).
inline RVector coefficients_from_samples(const CradleConfig& cradle, const SampledSignal& sig) {
  detail::require_unfrozen(cradle);
  return basis_matrix(cradle, sig.mu).transpose() * sig.amplitudes;
}

// f(s) = sum_n <s|s_n(mu)> f(s_n(mu)).
inline double reconstruct(const CradleConfig& cradle, const SampledSignal& sig, double s) {
  return evaluate(cradle, coefficients_from_samples(cradle, sig), s);
}

inline RVector reconstruct(const CradleConfig& cradle, const SampledSignal& sig, const std::vector<double>& grid) {
  const RVector c = coefficients_from_samples(cradle, sig);
  RVector out(static_cast<Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) out(static_cast<Index>(i)) = evaluate(cradle, c, grid[i]);
  return out;
}

// Re-samples a signal on the lattice of S(mu_target).
inline SampledSignal resample(const CradleConfig& cradle, const SampledSignal& sig, double mu_target) {
  return sample(cradle, coefficients_from_samples(cradle, sig), mu_target);
}

// Cradle whose mu = 0 lattice is exactly `nodes`: S = diag(nodes), and v has
// the given weights |v_n|^2 (uniform when empty). The node spacing sets the
// local sample density.
inline CradleConfig varying_rate_demo(const std::vector<double>& nodes, const std::vector<double>& weights = {}) {
  if (nodes.size() < 2) throw InvalidProfile("a sampling profile needs at least two nodes");
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!(nodes[i] < nodes[i + 1])) throw InvalidProfile("sampling nodes must be strictly ascending");
  const Index n = static_cast<Index>(nodes.size());
  RVector values(n);
  for (Index i = 0; i < n; ++i) values(i) = nodes[static_cast<std::size_t>(i)];

  CVector v(n);
  if (weights.empty()) {
    v.setConstant(Complex(1.0 / std::sqrt(double(n)), 0.0));
  } else {
    if (weights.size() != nodes.size()) throw InvalidProfile("one weight per node is required");
    for (Index i = 0; i < n; ++i) {
      const double w = weights[static_cast<std::size_t>(i)];
      if (!(w > 0.0)) throw InvalidProfile("profile weights must be positive");
      v(i) = std::sqrt(w);
    }
    v /= v.norm();
  }
  try {
    return CradleConfig::from_coefficients(SpectralDecomposition::diagonal(values), v);
  } catch (const DegenerateSpectrum&) {
    throw InvalidProfile("sampling nodes are too close to be resolved");
  }
}

}  // namespace cradle
