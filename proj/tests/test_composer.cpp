#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "cradle/composer.hpp"
#include "support/oracles.hpp"

using namespace cradle;

namespace {

double pair_scale(const CMatrix& s, const CMatrix& r) { return oracle::spectral_norm(s) + oracle::spectral_norm(r); }

}  // namespace

TEST(RankOneDecompose, ZeroIsEmpty) {
  EXPECT_TRUE(rank_one_decompose(HermitianOperator::zero(4)).empty());
}

TEST(RankOneDecompose, SingleProjector) {
  CMatrix r = CMatrix::Zero(3, 3);
  r(0, 0) = 2.5;
  const std::vector<RankOneTerm> terms = rank_one_decompose(HermitianOperator(r));
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_NEAR(terms[0].weight, 2.5, 1e-15);
  EXPECT_NEAR(std::abs(terms[0].direction(0)), 1.0, 1e-15);
}

TEST(RankOneDecompose, ReassemblesAndSortsByMagnitude) {
  oracle::Rng rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = rng.integer(2, 16);
    const CMatrix r = rng.hermitian(n);
    const std::vector<RankOneTerm> terms = rank_one_decompose(HermitianOperator(r));
    EXPECT_LE((assemble(terms, n) - r).cwiseAbs().maxCoeff(), 1e-10 * oracle::spectral_norm(r));
    for (std::size_t j = 1; j < terms.size(); ++j)
      EXPECT_GE(std::abs(terms[j - 1].weight), std::abs(terms[j].weight));
  }
}

TEST(Recoefficient, ZeroMuKeepsCoefficientsUpToPhase) {
  // The result is expressed in the kernel's re-phased basis.
  oracle::Rng rng(82);
  const CradleConfig c = make_cradle(HermitianOperator(rng.hermitian(5)), rng.unit_vector(5));
  const CVector w = rng.unit_vector(5);
  const CVector out = recoefficient(c, 0.0, w);
  EXPECT_LE((out.cwiseAbs() - w.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((out - rephasing(c).conjugate().cwiseProduct(w)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Recoefficient, MatchesDenseEigenvectors) {
  oracle::Rng rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = rng.integer(2, 10);
    const CMatrix s = rng.hermitian(n);
    const CVector v = rng.unit_vector(n);
    const CVector w = rng.unit_vector(n);
    const CradleConfig c = make_cradle(HermitianOperator(s), v);
    const double mu = rng.uniform(-3.0, 3.0);
    const CVector coeffs = c.base().eigenvectors().adjoint() * w;
    const CVector ours = recoefficient(c, mu, coeffs);
    const oracle::DenseEig eig = oracle::dense_eig(s + oracle::rank_one(v, mu));
    for (Index k = 0; k < n; ++k) EXPECT_NEAR(std::abs(ours(k)), std::abs(eig.vectors.col(k).dot(w)), 1e-9);
    EXPECT_LE((eigenvectors_at(c, mu).adjoint() * w - ours).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(ComposeSum, ZeroUpdateReturnsBase) {
  oracle::Rng rng(84);
  const HermitianOperator s(rng.hermitian(5));
  const ComposeResult out = compose_sum(s, HermitianOperator::zero(5));
  const SpectralDecomposition base = eigendecompose(s);
  EXPECT_TRUE(out.steps.empty());
  EXPECT_EQ(out.final_state.eigenvalues(), base.eigenvalues());
  EXPECT_LE((out.final_state.eigenvectors() - base.eigenvectors()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ComposeSum, TwoLevelExample) {
  RVector d(2);
  d << 0.0, 1.0;
  CVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const ComposeResult out =
      compose_sum(HermitianOperator::diagonal(d), HermitianOperator(oracle::rank_one(v, 4.0 / 3.0)));
  ASSERT_EQ(out.steps.size(), 1u);
  EXPECT_NEAR(out.final_state.eigenvalue(0), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(out.final_state.eigenvalue(1), 2.0, 1e-12);
  EXPECT_EQ(out.steps[0].index, 1u);
  EXPECT_NEAR(out.steps[0].min_gap, 5.0 / 3.0, 1e-12);
}

TEST(ComposeSum, RandomPairsMatchDense) {
  oracle::Rng rng(85);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = rng.integer(2, 16);
    const CMatrix s = rng.hermitian(n);
    const CMatrix r = rng.hermitian(n);
    const ComposeResult out = compose_sum(HermitianOperator(s), HermitianOperator(r));
    const double scale = pair_scale(s, r);
    const oracle::DenseEig eig = oracle::dense_eig(s + r);
    EXPECT_LE((out.final_state.eigenvalues() - eig.values).cwiseAbs().maxCoeff(), 1e-8 * scale);
    for (Index k = 0; k < n; ++k) {
      const CVector ours = out.final_state.eigenvectors().col(k);
      const Complex phase = ours.dot(eig.vectors.col(k));
      EXPECT_NEAR(std::abs(phase), 1.0, 1e-7);
      EXPECT_LE((phase * ours - eig.vectors.col(k)).cwiseAbs().maxCoeff(), 1e-7);
    }
  }
}

TEST(ComposeSum, ReconstructsSum) {
  oracle::Rng rng(86);
  const CMatrix s = rng.hermitian(8);
  const CMatrix r = rng.hermitian(8);
  const ComposeResult out = compose_sum(HermitianOperator(s), HermitianOperator(r));
  const CMatrix diff = out.final_state.reconstruct() - (s + r);
  EXPECT_LE(diff.cwiseAbs().maxCoeff(), 1e-9 * pair_scale(s, r));
  EXPECT_LE(orthonormality_defect(out.final_state.eigenvectors()), 1e-12);
}

TEST(ComposeSum, OrderIndependence) {
  oracle::Rng rng(87);
  const Index n = 8;
  const CMatrix s = rng.hermitian(n);
  const CMatrix r = rng.hermitian(n);
  const RVector reference = compose_sum(HermitianOperator(s), HermitianOperator(r)).final_state.eigenvalues();
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    ComposeOptions opts;
    opts.order = order;
    const RVector permuted = compose_sum(HermitianOperator(s), HermitianOperator(r), opts).final_state.eigenvalues();
    EXPECT_LE((permuted - reference).cwiseAbs().maxCoeff(), 1e-8 * pair_scale(s, r));
  }
}

TEST(ComposeSum, RejectsBadOrder) {
  oracle::Rng rng(88);
  const HermitianOperator s(rng.hermitian(3));
  const HermitianOperator r(rng.hermitian(3));
  for (const std::vector<std::size_t>& bad : {std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{0, 1, 1},
                                               std::vector<std::size_t>{0, 1, 3}, std::vector<std::size_t>{}}) {
    ComposeOptions opts;
    opts.order = bad;
    EXPECT_THROW(compose_sum(s, r, opts), InputError);
  }
  EXPECT_THROW(compose_sum(s, HermitianOperator(rng.hermitian(4))), InputError);
}

TEST(ComposeSum, TraceBookkeeping) {
  oracle::Rng rng(89);
  const CMatrix s = rng.hermitian(7);
  const CMatrix r = rng.hermitian(7);
  const ComposeResult out = compose_sum(HermitianOperator(s), HermitianOperator(r));
  const double scale = pair_scale(s, r);
  double expected = s.trace().real();
  for (const CradleStep& step : out.steps) {
    expected += step.weight;
    EXPECT_NEAR(step.eigenvalues_after.sum(), expected, 1e-10 * scale * 7);
    EXPECT_NEAR(step.eigenvalues_before.sum() + step.weight, step.eigenvalues_after.sum(), 1e-10 * scale * 7);
  }
}

TEST(ComposeSum, StepsInterlaceWithinEachStep) {
  oracle::Rng rng(90);
  const ComposeResult out = compose_sum(HermitianOperator(rng.hermitian(6)), HermitianOperator(rng.hermitian(6)));
  for (const CradleStep& step : out.steps) {
    const RVector& a = step.eigenvalues_before;
    const RVector& b = step.eigenvalues_after;
    for (Index k = 0; k < a.size(); ++k) {
      if (step.weight > 0.0) {
        EXPECT_GE(b(k), a(k));
        if (k + 1 < a.size()) { EXPECT_LE(b(k), a(k + 1)); }
      } else {
        EXPECT_LE(b(k), a(k));
        if (k > 0) { EXPECT_GE(b(k), a(k - 1)); }
      }
    }
  }
}

TEST(PartialSumTrace, EndpointsAndMidpoint) {
  oracle::Rng rng(91);
  const CMatrix s = rng.hermitian(6);
  const CMatrix r = rng.hermitian(6);
  const HermitianOperator hs(s), hr(r);
  const double scale = pair_scale(s, r);
  EXPECT_LE((partial_sum_trace(hs, hr, 0.0).final_state.eigenvalues() - oracle::dense_eigenvalues(s))
                .cwiseAbs()
                .maxCoeff(),
            1e-12 * scale);
  EXPECT_EQ(partial_sum_trace(hs, hr, 1.0).final_state.eigenvalues(), compose_sum(hs, hr).final_state.eigenvalues());
  EXPECT_LE((partial_sum_trace(hs, hr, 0.5).final_state.eigenvalues() - oracle::dense_eigenvalues(s + 0.5 * r))
                .cwiseAbs()
                .maxCoeff(),
            1e-8 * scale);
}

TEST(ComposeSum, IntermediateDegeneracyNamesTheStep) {
  // First step lifts level 0 onto level 1.
  RVector d(3);
  d << 0.0, 1.0, 2.0;
  CMatrix r = CMatrix::Zero(3, 3);
  r(0, 0) = 1.0;
  try {
    compose_sum(HermitianOperator::diagonal(d), HermitianOperator(r));
    FAIL() << "expected IntermediateDegeneracy";
  } catch (const IntermediateDegeneracy& e) {
    EXPECT_EQ(e.step(), 1u);
  }
}

TEST(ComposeSum, JitterBreaksDegeneracy) {
  RVector d(3);
  d << 0.0, 1.0, 2.0;
  CMatrix r = CMatrix::Zero(3, 3);
  r(0, 0) = 1.0;
  ComposeOptions opts;
  opts.jitter = true;
  opts.seed = 7;
  const ComposeResult out = compose_sum(HermitianOperator::diagonal(d), HermitianOperator(r), opts);
  const RVector dense = oracle::dense_eigenvalues(CMatrix(HermitianOperator::diagonal(d).matrix() + r));
  EXPECT_LE((out.final_state.eigenvalues() - dense).cwiseAbs().maxCoeff(), 1e-8 * 3.0);
}

TEST(ComposeSum, FrozenLevelsPassThrough) {
  // Each direction is a base eigenvector, so the other levels stay frozen
  // and the first step carries level 0 past levels 1 and 2.
  RVector d(4);
  d << 0.0, 1.0, 2.0, 3.0;
  CMatrix r = CMatrix::Zero(4, 4);
  r(0, 0) = 2.5;
  r(3, 3) = -0.25;
  const ComposeResult out = compose_sum(HermitianOperator::diagonal(d), HermitianOperator(r));
  ASSERT_EQ(out.steps.size(), 2u);
  RVector expected(4);
  expected << 1.0, 2.0, 2.5, 2.75;
  EXPECT_LE((out.final_state.eigenvalues() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(std::abs(out.final_state.eigenvectors()(0, 2)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(out.final_state.eigenvectors()(3, 3)), 1.0, 1e-12);
}
