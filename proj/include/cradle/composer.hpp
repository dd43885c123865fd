#pragma once

// S + R as a sequence of Hermitian cradles, one per rank-one term of R.
//
// The running state is the spectrum of the partial sum together with its
// eigenvectors. Each step adds mu_j |v_j><v_j|: the new eigenvalues come from
// the secular solver, the new eigenbasis from the overlap kernel, and every
// pending direction is re-expressed in that basis through the kernel rows.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "cradle/kernel.hpp"
#include "cradle/secular.hpp"

namespace cradle {

struct RankOneTerm {
  double weight = 0.0;
  CVector direction;  // unit vector, original basis
};

// Eigenvalues of R with |mu| <= this fraction of ||R|| are dropped.
inline constexpr double kNegligibleWeight = 1e-13;

// R = sum_j mu_j |v_j><v_j| over orthonormal v_j, ordered by descending |mu_j|.
inline std::vector<RankOneTerm> rank_one_decompose(const HermitianOperator& r) {
  const Eigensystem es = dense_eigensystem(r);
  const double scale = es.values.cwiseAbs().maxCoeff();
  std::vector<RankOneTerm> terms;
  if (scale == 0.0) return terms;
  for (Index n = 0; n < es.values.size(); ++n) {
    if (std::abs(es.values(n)) <= kNegligibleWeight * scale) continue;
    terms.push_back({es.values(n), es.vectors.col(n)});
  }
  std::stable_sort(terms.begin(), terms.end(), [](const RankOneTerm& a, const RankOneTerm& b) {
    return std::abs(a.weight) > std::abs(b.weight);
  });
  return terms;
}

inline CMatrix assemble(const std::vector<RankOneTerm>& terms, Index dim) {
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const RankOneTerm& t : terms) out += t.weight * t.direction * t.direction.adjoint();
  return out;
}

// Coefficients of a direction in the eigenbasis of S(mu), given its
// coefficients in the base eigenbasis of `prior`:
//   v'_n = sum_r <s_n(mu)|s_r> <s_r|v>.
inline CVector recoefficient(const CradleConfig& prior, double mu, const CVector& coefficients) {
  const RMatrix q = basis_matrix(prior, mu);
  return q.cast<Complex>() * (rephasing(prior).conjugate().asDiagonal() * coefficients);
}

struct CradleStep {
  std::size_t index = 0;  // 1-based
  double weight = 0.0;
  CVector direction;      // original basis
  CVector coefficients;   // in the eigenbasis at the start of the step
  RVector eigenvalues_before;
  RVector eigenvalues_after;
  double min_gap = 0.0;   // smallest adjacent gap after the step
};

struct ComposeOptions {
  // Explicit step order as indices into the descending-|mu| term list.
  std::optional<std::vector<std::size_t>> order;
  // Scales every weight; partial sums S + tR.
  double scale = 1.0;
  // Opt-in: perturb each weight by uniform noise of size 1e-10 ||S|| to
  // break accidental intermediate degeneracies.
  bool jitter = false;
  std::uint64_t seed = 0;
};

struct ComposeResult {
  SpectralDecomposition final_state;
  std::vector<CradleStep> steps;
};

namespace detail {

// Modified Gram-Schmidt on the columns.
inline void orthonormalize(CMatrix& x) {
  for (Index k = 0; k < x.cols(); ++k) {
    for (Index i = 0; i < k; ++i) x.col(k) -= x.col(i).dot(x.col(k)) * x.col(i);
    x.col(k) /= x.col(k).norm();
  }
}

inline double min_adjacent_gap(const RVector& values) {
  double gap = std::numeric_limits<double>::infinity();
  for (Index k = 0; k + 1 < values.size(); ++k) gap = std::min(gap, values(k + 1) - values(k));
  return gap;
}

}  // namespace detail

inline ComposeResult compose_terms(const SpectralDecomposition& start, std::vector<RankOneTerm> terms,
                                   const ComposeOptions& options = {}) {
  const Index n = start.dim();
  if (options.order) {
    const auto& order = *options.order;
    std::vector<std::size_t> check = order;
    std::sort(check.begin(), check.end());
    bool valid = check.size() == terms.size();
    for (std::size_t i = 0; valid && i < check.size(); ++i) valid = check[i] == i;
    if (!valid) throw InputError("step order must be a permutation of the rank-one terms");
    std::vector<RankOneTerm> reordered;
    for (const std::size_t i : order) reordered.push_back(terms[i]);
    terms = std::move(reordered);
  }
  if (options.jitter) {
    const double amplitude = 1e-10 * start.eigenvalues().cwiseAbs().maxCoeff();
    std::mt19937_64 engine(options.seed);
    std::uniform_real_distribution<double> noise(-amplitude, amplitude);
    for (RankOneTerm& t : terms) t.weight += noise(engine);
  }

  RVector values = start.eigenvalues();
  CMatrix basis = start.eigenvectors();
  CMatrix pending(n, static_cast<Index>(terms.size()));
  for (std::size_t j = 0; j < terms.size(); ++j)
    pending.col(static_cast<Index>(j)) = basis.adjoint() * terms[j].direction;

  ComposeResult result{start, {}};
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const Index col = static_cast<Index>(j);
    const double mu = options.scale * terms[j].weight;
    CVector coeffs = pending.col(col);
    coeffs /= coeffs.norm();

    CradleStep step;
    step.index = j + 1;
    step.weight = mu;
    step.direction = terms[j].direction;
    step.coefficients = coeffs;
    step.eigenvalues_before = values;

    try {
      const CradleConfig cradle =
          CradleConfig::from_coefficients(SpectralDecomposition::diagonal(values), coeffs);
      const RMatrix q = basis_matrix(cradle, mu);
      RVector moved = eigenvalues_at(cradle, mu);

      const CVector phase = rephasing(cradle);
      const CMatrix qc = q.cast<Complex>();
      basis = basis * phase.asDiagonal() * qc.transpose();
      if (j + 1 < terms.size()) {
        const Index rest = pending.cols() - col - 1;
        pending.rightCols(rest) = qc * (phase.conjugate().asDiagonal() * pending.rightCols(rest));
      }

      // Frozen levels may have been overtaken; restore ascending labels.
      std::vector<Index> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), Index{0});
      std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) { return moved(a) < moved(b); });
      RVector sorted(n);
      CMatrix sorted_basis(n, n);
      CMatrix sorted_pending(n, pending.cols());
      for (Index k = 0; k < n; ++k) {
        const Index from = perm[static_cast<std::size_t>(k)];
        sorted(k) = moved(from);
        sorted_basis.col(k) = basis.col(from);
        sorted_pending.row(k) = pending.row(from);
      }
      values = std::move(sorted);
      basis = std::move(sorted_basis);
      pending = std::move(sorted_pending);
      require_nondegenerate(values);
    } catch (const DegenerateSpectrum& e) {
      throw IntermediateDegeneracy(j + 1, e);
    }

    if (orthonormality_defect(basis) > 1e-10) detail::orthonormalize(basis);
    step.eigenvalues_after = values;
    step.min_gap = detail::min_adjacent_gap(values);
    result.steps.push_back(std::move(step));
  }

  detail::orthonormalize(basis);
  result.final_state = SpectralDecomposition::from_parts(values, basis);
  return result;
}

inline ComposeResult compose_sum(const HermitianOperator& s, const HermitianOperator& r,
                                 const ComposeOptions& options = {}) {
  if (s.dim() != r.dim()) throw InputError("S and R must have the same dimension");
  return compose_terms(eigendecompose(s), rank_one_decompose(r), options);
}

// Spectrum of S + tR through the same cradle steps with weights t mu_j.
inline ComposeResult partial_sum_trace(const HermitianOperator& s, const HermitianOperator& r, double t,
                                       ComposeOptions options = {}) {
  options.scale *= t;
  return compose_sum(s, r, options);
}

}  // namespace cradle
