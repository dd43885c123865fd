// Walks the two-level cradle S = diag(0, 1), v = (1, 1)/sqrt(2), then
// composes a random S + R and samples a signal on a clustered lattice.

#include <cstdio>
#include <random>

#include "cradle/cradle.hpp"

using namespace cradle;

int main() {
  RVector d(2);
  d << 0.0, 1.0;
  CVector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const CradleConfig c = make_cradle(HermitianOperator::diagonal(d), v);

  std::printf("asymptote s*_1 = %.17g\n", asymptotes(c).values(0));
  std::printf("%8s %12s %12s %10s %10s\n", "mu", "s_1", "s_2", "vel_1", "vel_2");
  for (const double mu : {-100.0, -4.0 / 3.0, 0.0, 4.0 / 3.0, 100.0}) {
    const RVector s = eigenvalues_at(c, mu);
    const RVector vel = velocities_at(c, mu);
    std::printf("%8.4f %12.8f %12.8f %10.6f %10.6f\n", mu, s(0), s(1), vel(0), vel(1));
  }

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const Index n = 6;
  CMatrix a(n, n), b(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      a(i, j) = Complex(normal(rng), normal(rng));
      b(i, j) = Complex(normal(rng), normal(rng));
    }
  const ComposeResult r = compose_sum(HermitianOperator::hermitian_part(a), HermitianOperator::hermitian_part(b));
  std::printf("\n%zu cradle steps; final spectrum:", r.steps.size());
  for (Index k = 0; k < n; ++k) std::printf(" %.6f", r.final_state.eigenvalue(k));
  std::printf("\n");

  // Dense nodes near 0, sparse further out.
  const CradleConfig lattice = varying_rate_demo({0.0, 0.1, 0.2, 0.4, 1.0, 2.5});
  RVector coeffs(6);
  coeffs << 1.0, 0.5, -0.25, 0.0, 0.3, -0.1;
  const SampledSignal sig = sample(lattice, coeffs, 0.8);
  std::printf("\nsignal on the mu = 0.8 lattice:\n");
  for (Index k = 0; k < 6; ++k) std::printf("  f(%.6f) = %+.6f\n", sig.nodes(k), sig.amplitudes(k));
  std::printf("f(1.7) from those samples: %+.6f\n", reconstruct(lattice, sig, 1.7));
  return 0;
}
