#pragma once

// Dense Hermitian/unitary operator types, ordered eigendecompositions and
// the construction of Hermitian cradles S + mu |v><v|.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cradle/types.hpp"

namespace cradle {

inline double max_abs_entry(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Largest absolute deviation of the columns of `vectors` from orthonormality.
inline double orthonormality_defect(const CMatrix& vectors) {
  const Index n = vectors.cols();
  return max_abs_entry(vectors.adjoint() * vectors - CMatrix::Identity(n, n));
}

class HermitianOperator {
 public:
  explicit HermitianOperator(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
      throw NotHermitian("operator must be square, got " + std::to_string(entries_.rows()) + "x" +
                         std::to_string(entries_.cols()));
    if (entries_.rows() < 2) throw NotHermitian("operator dimension must be at least 2");
    const double tol = 1e-12 * max_abs_entry(entries_);
    const double defect = max_abs_entry(entries_ - entries_.adjoint());
    if (defect > tol)
      throw NotHermitian("operator is not Hermitian (max |H - H^dag| = " + std::to_string(defect) +
                         ")");
  }

  // Builds from an arbitrary square matrix by taking (M + M^dag)/2.
  static HermitianOperator hermitian_part(const CMatrix& m) {
    return HermitianOperator(CMatrix(0.5 * (m + m.adjoint())));
  }

  static HermitianOperator from_real(const RMatrix& m) { return HermitianOperator(m.cast<Complex>()); }

  static HermitianOperator diagonal(const RVector& d) {
    return HermitianOperator(CMatrix(d.cast<Complex>().asDiagonal()));
  }

  static HermitianOperator zero(Index dim) { return HermitianOperator(CMatrix::Zero(dim, dim)); }

  Index dim() const { return entries_.rows(); }
  const CMatrix& matrix() const { return entries_; }

  // Spectral norm; the largest eigenvalue magnitude.
  double norm() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(entries_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }

  friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator::hermitian_part(a.entries_ + b.entries_);
  }
  friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator::hermitian_part(a.entries_ - b.entries_);
  }
  friend HermitianOperator operator*(double c, const HermitianOperator& a) {
    return HermitianOperator(CMatrix(c * a.entries_));
  }

 private:
  CMatrix entries_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 2)
      throw NotUnitary("unitary must be square with dimension at least 2");
    const double defect = orthonormality_defect(entries_);
    if (defect > 1e-12)
      throw NotUnitary("operator is not unitary (max |U^dag U - 1| = " + std::to_string(defect) +
                       ")");
  }

  Index dim() const { return entries_.rows(); }
  const CMatrix& matrix() const { return entries_; }

 private:
  CMatrix entries_;
};

// ---------------------------------------------------------------------------

// Raw Hermitian eigensystem, ascending, degeneracies permitted.
struct Eigensystem {
  RVector values;
  CMatrix vectors;
};

// Rotates each column so its largest-magnitude entry (first one on ties) is
// real and positive.
inline void normalize_phases(CMatrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index pivot = 0;
    double best = -1.0;
    for (Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        pivot = r;
      }
    }
    if (best <= 0.0) continue;
    const Complex phase = std::conj(vectors(pivot, c)) / best;
    vectors.col(c) *= phase;
    vectors(pivot, c) = Complex(std::abs(vectors(pivot, c)), 0.0);
  }
}

inline Eigensystem dense_eigensystem(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  Eigensystem out{solver.eigenvalues(), solver.eigenvectors()};
  normalize_phases(out.vectors);
  return out;
}

// Throws DegenerateSpectrum unless the ascending values are strictly
// separated by more than kDegeneracyRatio * spread.
inline void require_nondegenerate(const RVector& values) {
  const Index n = values.size();
  if (n < 2) return;
  const double spread = values(n - 1) - values(0);
  const double min_gap = kDegeneracyRatio * spread;
  for (Index k = 0; k + 1 < n; ++k) {
    const double gap = values(k + 1) - values(k);
    if (!(gap > min_gap) || gap <= 0.0) throw DegenerateSpectrum(k, k + 1, gap);
  }
}

class SpectralDecomposition {
 public:
  // Validates strict ordering and orthonormality, then applies the phase
  // convention. `orthonormality_tol` bounds max |X^dag X - 1|.
  static SpectralDecomposition from_parts(RVector eigenvalues, CMatrix eigenvectors,
                                          double orthonormality_tol = 1e-12) {
    if (eigenvectors.rows() != eigenvectors.cols() || eigenvectors.cols() != eigenvalues.size())
      throw InputError("eigenvector matrix shape does not match eigenvalue count");
    if (eigenvalues.size() < 2) throw InputError("decomposition dimension must be at least 2");
    require_nondegenerate(eigenvalues);
    const double defect = orthonormality_defect(eigenvectors);
    if (defect > orthonormality_tol)
      throw NumericError("eigenvectors are not orthonormal (defect " + std::to_string(defect) + ")");
    normalize_phases(eigenvectors);
    return SpectralDecomposition(std::move(eigenvalues), std::move(eigenvectors));
  }

  // Decomposition of diag(values) with the standard basis as eigenvectors.
  static SpectralDecomposition diagonal(RVector values) {
    const Index n = values.size();
    if (n < 2) throw InputError("decomposition dimension must be at least 2");
    require_nondegenerate(values);
    return SpectralDecomposition(std::move(values), CMatrix::Identity(n, n));
  }

  Index dim() const { return eigenvalues_.size(); }
  const RVector& eigenvalues() const { return eigenvalues_; }
  const CMatrix& eigenvectors() const { return eigenvectors_; }
  double eigenvalue(Index n) const { return eigenvalues_(n); }
  double spread() const { return eigenvalues_(dim() - 1) - eigenvalues_(0); }

  CMatrix reconstruct() const {
    return eigenvectors_ * eigenvalues_.cast<Complex>().asDiagonal() * eigenvectors_.adjoint();
  }

 private:
  SpectralDecomposition(RVector values, CMatrix vectors)
      : eigenvalues_(std::move(values)), eigenvectors_(std::move(vectors)) {}

  RVector eigenvalues_;
  CMatrix eigenvectors_;
};

inline SpectralDecomposition eigendecompose(const HermitianOperator& h) {
  Eigensystem es = dense_eigensystem(h);
  return SpectralDecomposition::from_parts(std::move(es.values), std::move(es.vectors));
}

// ---------------------------------------------------------------------------

// A Hermitian cradle: the base decomposition of S together with the anchor
// coefficients v_n = <s_n|v>. Levels with |v_n| <= kFreezeThreshold are
// frozen and never move under S + mu |v><v|.
class CradleConfig {
 public:
  const SpectralDecomposition& base() const { return base_; }
  Index dim() const { return base_.dim(); }

  const CVector& coefficients() const { return coeffs_; }
  // |v_n|^2, with frozen levels stored as exactly zero.
  const RVector& weights() const { return weights_; }
  const RVector& magnitudes() const { return magnitudes_; }

  bool is_frozen(Index n) const { return frozen_[static_cast<std::size_t>(n)]; }
  bool has_frozen() const { return active_.size() != static_cast<std::size_t>(dim()); }
  const std::vector<Index>& active_levels() const { return active_; }
  std::vector<Index> frozen_levels() const {
    std::vector<Index> out;
    for (Index n = 0; n < dim(); ++n)
      if (is_frozen(n)) out.push_back(n);
    return out;
  }

  // The anchor vector in the operator's own basis.
  CVector anchor() const { return base_.eigenvectors() * coeffs_; }

  // S + mu |v><v| as a dense operator in the original basis.
  HermitianOperator operator_at(double mu) const {
    const CVector v = anchor();
    return HermitianOperator::hermitian_part(base_.reconstruct() + mu * v * v.adjoint());
  }

  // Coefficients are given in the eigenbasis of `base`.
  static CradleConfig from_coefficients(SpectralDecomposition base, CVector coeffs) {
    if (coeffs.size() != base.dim())
      throw InvalidAnchor("anchor has " + std::to_string(coeffs.size()) + " components, expected " +
                          std::to_string(base.dim()));
    const double norm = coeffs.norm();
    if (!(std::abs(norm - 1.0) <= 1e-12))
      throw InvalidAnchor("anchor vector must be normalized, |v| = " + std::to_string(norm));
    return CradleConfig(std::move(base), std::move(coeffs));
  }

 private:
  CradleConfig(SpectralDecomposition base, CVector coeffs)
      : base_(std::move(base)), coeffs_(std::move(coeffs)) {
    const Index n = base_.dim();
    weights_.resize(n);
    magnitudes_.resize(n);
    frozen_.assign(static_cast<std::size_t>(n), false);
    for (Index k = 0; k < n; ++k) {
      const double a = std::abs(coeffs_(k));
      if (a <= kFreezeThreshold) {
        frozen_[static_cast<std::size_t>(k)] = true;
        magnitudes_(k) = 0.0;
        weights_(k) = 0.0;
      } else {
        active_.push_back(k);
        magnitudes_(k) = a;
        weights_(k) = a * a;
      }
    }
  }

  SpectralDecomposition base_;
  CVector coeffs_;
  RVector weights_;
  RVector magnitudes_;
  std::vector<bool> frozen_;
  std::vector<Index> active_;
};

// v is given in the same basis as the operator that produced `base`.
inline CradleConfig make_cradle(SpectralDecomposition base, const CVector& v) {
  if (v.size() != base.dim())
    throw InvalidAnchor("anchor has " + std::to_string(v.size()) + " components, expected " +
                        std::to_string(base.dim()));
  const double norm = v.norm();
  if (!(std::abs(norm - 1.0) <= 1e-12))
    throw InvalidAnchor("anchor vector must be normalized, |v| = " + std::to_string(norm));
  CVector coeffs = base.eigenvectors().adjoint() * v;
  // Re-normalize away the rounding of the basis change.
  coeffs /= coeffs.norm();
  return CradleConfig::from_coefficients(std::move(base), std::move(coeffs));
}

inline CradleConfig make_cradle(const HermitianOperator& s, const CVector& v) {
  return make_cradle(eigendecompose(s), v);
}

}  // namespace cradle
