#include <gtest/gtest.h>

#include "cradle/unitary.hpp"
#include "support/oracles.hpp"

using namespace cradle;

namespace {

UnitaryCradle random_unitary_cradle(oracle::Rng& rng, Index n) {
  const UnitaryOperator u = cayley_to_unitary(HermitianOperator(rng.hermitian(n)));
  return make_unitary_cradle(u, rng.unit_vector(n));
}

double second_over_first_singular(const CMatrix& m) {
  const Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(1) / svd.singularValues()(0);
}

}  // namespace

TEST(Cayley, ZeroMapsToMinusIdentity) {
  const UnitaryOperator u = cayley_to_unitary(HermitianOperator::zero(3));
  EXPECT_LE((u.matrix() + CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Cayley, MoebiusOfOne) {
  const Complex u = mobius(1.0);
  EXPECT_NEAR(u.real(), 0.0, 1e-16);
  EXPECT_NEAR(u.imag(), -1.0, 1e-16);
  EXPECT_NEAR(inverse_mobius(Complex(0.0, -1.0)), 1.0, 1e-15);
}

TEST(Cayley, MinusIdentityMapsToZero) {
  const HermitianOperator s = cayley_to_hermitian(UnitaryOperator(CMatrix(-CMatrix::Identity(2, 2))));
  EXPECT_LE(s.matrix().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Cayley, DiagonalMinusIGivesOne) {
  CMatrix u = CMatrix::Zero(2, 2);
  u(0, 0) = Complex(0.0, -1.0);
  u(1, 1) = -1.0;
  const HermitianOperator s = cayley_to_hermitian(UnitaryOperator(u));
  EXPECT_NEAR(s.matrix()(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(s.matrix()(1, 1).real(), 0.0, 1e-15);
}

TEST(Cayley, EigenvalueOneIsSingular) {
  CMatrix u = CMatrix::Identity(2, 2);
  u(1, 1) = -1.0;
  EXPECT_THROW(cayley_to_hermitian(UnitaryOperator(u)), CayleySingular);
}

TEST(Cayley, RoundTrip) {
  oracle::Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix s = rng.hermitian(rng.integer(2, 12));
    const HermitianOperator back = cayley_to_hermitian(cayley_to_unitary(HermitianOperator(s)));
    EXPECT_LE((back.matrix() - s).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(Cayley, EigenvaluesFollowMoebius) {
  oracle::Rng rng(62);
  const CMatrix s = rng.hermitian(6);
  const std::vector<double> phases = oracle::unitary_phases(cayley_to_unitary(HermitianOperator(s)).matrix());
  const RVector values = oracle::dense_eigenvalues(s);
  for (Index n = 0; n < 6; ++n) EXPECT_NEAR(phases[static_cast<std::size_t>(n)], phase_of(values(n)), 1e-12);
}

TEST(UnitaryCradle, InvariantsHold) {
  oracle::Rng rng(63);
  const UnitaryCradle uc = random_unitary_cradle(rng, 6);
  for (Index n = 0; n < 6; ++n) {
    EXPECT_NEAR(std::abs(uc.eigenvalue(n)), 1.0, 1e-12);
    if (n > 0) { EXPECT_GT(uc.phases()(n), uc.phases()(n - 1)); }
  }
  double a = 0.0;
  for (Index m = 0; m < 6; ++m)
    a += std::norm(uc.w_coefficients()(m)) * (std::pow(uc.hermitian_eigenvalues()(m), 2) + 1.0);
  EXPECT_NEAR(uc.normalization(), 0.5 * std::sqrt(a), 1e-14);
  EXPECT_GT(uc.alpha_star(), 0.0);
  EXPECT_LT(uc.alpha_star(), kTwoPi);
}

TEST(UofAlpha, ZeroIsBase) {
  oracle::Rng rng(64);
  const UnitaryCradle uc = random_unitary_cradle(rng, 4);
  EXPECT_EQ(u_of_alpha(uc, 0.0).matrix(), uc.base().matrix());
}

TEST(UofAlpha, EigenvectorAnchorMovesOneLevel) {
  oracle::Rng rng(65);
  const HermitianOperator s(rng.hermitian(4));
  const SpectralDecomposition sd = eigendecompose(s);
  const UnitaryCradle uc = make_unitary_cradle(cayley_to_unitary(s), sd.eigenvectors().col(1));
  const RVector phases = eigenphases_at(uc, 0.7);
  for (Index n = 0; n < 4; ++n) {
    const double expected = n == 1 ? wrap_phase(uc.phases()(1) + 0.7) : uc.phases()(n);
    EXPECT_NEAR(oracle::angle_distance(phases(n), expected), 0.0, 1e-12);
  }
  const std::vector<double> dense = oracle::unitary_phases(u_of_alpha(uc, 0.7).matrix());
  std::vector<double> ours(phases.data(), phases.data() + 4);
  std::sort(ours.begin(), ours.end());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(oracle::angle_distance(ours[i], dense[i]), 0.0, 1e-12);
}

TEST(AnchorMap, RoundTripAndNorm) {
  oracle::Rng rng(66);
  for (int trial = 0; trial < 20; ++trial) {
    const UnitaryCradle uc = random_unitary_cradle(rng, rng.integer(2, 10));
    const AnchorMap v = anchor_v_from_w(uc);
    EXPECT_NEAR(v.vector.norm(), 1.0, 1e-12);
    const CVector w = w_from_v(uc.hermitian_eigenvalues(), v.coefficients);
    // Same up to a global phase.
    const Complex phase = w.dot(uc.w_coefficients());
    EXPECT_NEAR(std::abs(phase), 1.0, 1e-11);
    EXPECT_LE((phase * w - uc.w_coefficients()).cwiseAbs().maxCoeff(), 1e-11);
    const double nv = uc.normalization();
    for (Index k = 0; k < uc.dim(); ++k) {
      const double sk = uc.hermitian_eigenvalues()(k);
      EXPECT_NEAR(std::norm(uc.w_coefficients()(k)), nv * nv * 4.0 * std::norm(v.coefficients(k)) / (sk * sk + 1.0),
                  1e-12);
    }
  }
}

TEST(AnchorMap, TwoLevelNorm) {
  RVector d(2);
  d << 0.0, 1.0;
  CVector w(2);
  w << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const UnitaryCradle uc = make_unitary_cradle(cayley_to_unitary(HermitianOperator::diagonal(d)), w);
  EXPECT_NEAR(anchor_v_from_w(uc).vector.norm(), 1.0, 1e-12);
}

TEST(AnchorMap, MatchesResolventFormula) {
  oracle::Rng rng(67);
  const UnitaryCradle uc = random_unitary_cradle(rng, 5);
  const Index n = 5;
  const CMatrix resolvent = (CMatrix::Identity(n, n) - uc.base().matrix()).inverse();
  const CVector direct = 2.0 / std::sqrt(uc.weight_sum()) * resolvent * uc.anchor();
  EXPECT_LE((direct - anchor_v_from_w(uc).vector).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(MuOfAlpha, Limits) {
  oracle::Rng rng(68);
  const UnitaryCradle uc = random_unitary_cradle(rng, 5);
  EXPECT_EQ(mu_of_alpha(uc, 0.0).value(), 0.0);
  EXPECT_LT(std::abs(mu_of_alpha(uc, 1e-9).value()), 1e-7);
  EXPECT_EQ(mu_of_alpha(uc, uc.alpha_star()), ExtendedReal::positive_infinity());
  EXPECT_GT(mu_of_alpha(uc, uc.alpha_star() - 1e-6).value(), 1e3);
  EXPECT_LT(mu_of_alpha(uc, uc.alpha_star() + 1e-6).value(), -1e3);
  EXPECT_LT(mu_of_alpha(uc, kTwoPi - 1e-9).value(), 0.0);
  EXPECT_GT(mu_of_alpha(uc, kTwoPi - 1e-9).value(), -1e-7);
}

TEST(MuOfAlpha, VFormAgrees) {
  oracle::Rng rng(69);
  const UnitaryCradle uc = random_unitary_cradle(rng, 6);
  const RVector& s = uc.hermitian_eigenvalues();
  const CVector v = anchor_v_from_w(uc).coefficients;
  double c1 = 0.0, c2 = 0.0;
  for (Index k = 0; k < 6; ++k) {
    c1 += std::norm(v(k)) / (s(k) * s(k) + 1.0);
    c2 += std::norm(v(k)) * s(k) / (s(k) * s(k) + 1.0);
  }
  for (const double alpha : {0.3, 1.2, 2.5, 4.0, 5.9}) {
    const ExtendedReal mu = mu_of_alpha(uc, alpha);
    if (!mu.is_finite()) continue;
    const double v_form = 1.0 / (c1 / std::tan(alpha / 2.0) - c2);
    EXPECT_NEAR(mu.value(), v_form, 1e-10 * (1.0 + std::abs(v_form)));
  }
}

TEST(MuOfAlpha, RoundTrip) {
  oracle::Rng rng(70);
  const UnitaryCradle uc = random_unitary_cradle(rng, 5);
  for (int i = 0; i < 100; ++i) {
    const double alpha = rng.uniform(1e-3, kTwoPi - 1e-3);
    EXPECT_NEAR(alpha_of_mu(uc, mu_of_alpha(uc, alpha)), alpha, 1e-10);
  }
  EXPECT_EQ(alpha_of_mu(uc, ExtendedReal::positive_infinity()), uc.alpha_star());
  for (const double mu : {-100.0, -1.0, -1e-3, 1e-3, 0.5, 40.0}) {
    const ExtendedReal back = mu_of_alpha(uc, alpha_of_mu(uc, mu));
    EXPECT_NEAR(back.value(), mu, 1e-10 * (1.0 + std::abs(mu)));
  }
}

TEST(CommutingDiagram, RankOneDifferenceWithMuOfAlpha) {
  oracle::Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const UnitaryCradle uc = random_unitary_cradle(rng, rng.integer(2, 8));
    const CMatrix s = cayley_to_hermitian(uc.base()).matrix();
    const CVector v = anchor_v_from_w(uc).vector;
    for (const double alpha : {0.4, 1.7, 3.0, 5.5}) {
      const ExtendedReal mu = mu_of_alpha(uc, alpha);
      if (!mu.is_finite()) continue;
      const CMatrix diff = cayley_to_hermitian(u_of_alpha(uc, alpha)).matrix() - s;
      const double scale = 1.0 + std::abs(mu.value());
      EXPECT_LE((diff - oracle::rank_one(v, mu.value())).cwiseAbs().maxCoeff(), 1e-9 * scale);
      EXPECT_LE(second_over_first_singular(diff), 1e-9);
    }
  }
}

TEST(Eigenphases, ZeroIsBase) {
  oracle::Rng rng(72);
  const UnitaryCradle uc = random_unitary_cradle(rng, 5);
  EXPECT_EQ(eigenphases_at(uc, 0.0), uc.phases());
}

TEST(Eigenphases, MatchDenseEigensolve) {
  oracle::Rng rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = rng.integer(2, 10);
    const UnitaryCradle uc = random_unitary_cradle(rng, n);
    for (const double alpha : {1.0, uc.alpha_star(), 4.5, kTwoPi - 0.1}) {
      RVector ours = eigenphases_at(uc, alpha);
      std::sort(ours.data(), ours.data() + n);
      const std::vector<double> dense = oracle::unitary_phases(u_of_alpha(uc, alpha).matrix());
      std::vector<double> sorted(ours.data(), ours.data() + n);
      // Sort both on the circle by matching nearest phases.
      for (const double p : sorted) {
        double best = 10.0;
        for (const double q : dense) best = std::min(best, oracle::angle_distance(p, q));
        EXPECT_LE(best, 1e-9);
      }
    }
  }
}

TEST(Eigenphases, MonotoneAndBeforeNextBasePhase) {
  oracle::Rng rng(74);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = rng.integer(2, 8);
    const UnitaryCradle uc = random_unitary_cradle(rng, n);
    RVector prev = phase_advance(uc, 0.0);
    for (int i = 1; i < 400; ++i) {
      const double alpha = kTwoPi * i / 400.0;
      const RVector adv = phase_advance(uc, alpha);
      for (Index k = 0; k < n; ++k) {
        const double room = wrap_phase(uc.phases()((k + 1) % n) - uc.phases()(k));
        const double limit = room == 0.0 ? kTwoPi : room;
        EXPECT_GT(adv(k), prev(k)) << "level " << k << " alpha " << alpha;
        EXPECT_LT(adv(k), limit);
      }
      prev = adv;
    }
  }
}

TEST(Eigenphases, ApproachNextBasePhase) {
  oracle::Rng rng(75);
  const UnitaryCradle uc = random_unitary_cradle(rng, 5);
  const RVector near_end = eigenphases_at(uc, kTwoPi - 1e-7);
  for (Index k = 0; k < 5; ++k)
    EXPECT_NEAR(oracle::angle_distance(near_end(k), uc.phases()((k + 1) % 5)), 0.0, 1e-5);
}

TEST(ComplexVelocity, FrozenLevelIsStill) {
  oracle::Rng rng(76);
  const HermitianOperator s(rng.hermitian(4));
  const SpectralDecomposition sd = eigendecompose(s);
  CVector w = sd.eigenvectors().col(0) + sd.eigenvectors().col(2);
  w /= w.norm();
  const UnitaryCradle uc = make_unitary_cradle(cayley_to_unitary(s), w);
  EXPECT_EQ(std::abs(complex_velocity(uc, 1, 0.0)), 0.0);
  EXPECT_EQ(std::abs(complex_velocity(uc, 3, 1.3)), 0.0);
}

TEST(ComplexVelocity, TangentAndMatchesFiniteDifference) {
  oracle::Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = rng.integer(2, 8);
    const UnitaryCradle uc = random_unitary_cradle(rng, n);
    const double alpha = rng.uniform(0.05, kTwoPi - 0.05);
    const double h = 1e-6;
    const RVector plus = phase_advance(uc, alpha + h);
    const RVector minus = phase_advance(uc, alpha - h);
    const RVector here = eigenphases_at(uc, alpha);
    for (Index k = 0; k < n; ++k) {
      const Complex du = complex_velocity(uc, k, alpha);
      const Complex u = std::polar(1.0, here(k));
      EXPECT_LE(std::abs((std::conj(u) * du).real()), 1e-12);
      const double fd = (plus(k) - minus(k)) / (2.0 * h);
      const double speed = angular_velocity(uc, k, alpha);
      EXPECT_LE(std::abs(fd - speed), 1e-5 * std::max(speed, 1e-3)) << "level " << k << " alpha " << alpha;
    }
  }
}

TEST(ComplexVelocity, SpeedsSumToOne) {
  oracle::Rng rng(78);
  const UnitaryCradle uc = random_unitary_cradle(rng, 6);
  for (const double alpha : {0.0, 0.5, uc.alpha_star(), 3.3, 6.0}) {
    double total = 0.0;
    for (Index k = 0; k < 6; ++k) total += angular_velocity(uc, k, alpha);
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}
