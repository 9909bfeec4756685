// Copyright 2026 The spdc-design Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "spdc/angle_map.hpp"
#include "spdc/config.hpp"
#include "spdc/quality.hpp"
#include "spdc/state.hpp"
#include "support/oracles.hpp"

namespace spdc {
namespace {

using std::numbers::pi;

PhasorEnsemble uniform_samples(double center, double half_width, int n) {
  PhasorEnsemble e;
  for (int k = 0; k < n; ++k) e.add(center - half_width + 2 * half_width * (k + 0.5) / n, 1.0);
  return e;
}

void expect_valid_state(const TwoQubitState& rho) {
  const auto& m = rho.matrix();
  EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(m.trace().real(), 1.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(PureState, BellProjectors) {
  const auto minus = pure_state(pi);
  const auto plus = pure_state(0.0);
  const Eigen::Vector4cd phi_minus = bell_vector(BellTarget::phi_minus);
  EXPECT_LT((minus.matrix() - phi_minus * phi_minus.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::Vector4cd phi_plus = bell_vector(BellTarget::phi_plus);
  EXPECT_LT((plus.matrix() - phi_plus * phi_plus.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  for (double d : {0.0, 0.3, 2.0, -5.0}) EXPECT_NEAR(pure_state(d).purity(), 1.0, 1e-14);
}

TEST(MixedState, SingleSampleIsPure) {
  PhasorEnsemble e;
  e.add(pi, 2.5);
  EXPECT_LT((mixed_state(e).matrix() - pure_state(pi).matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MixedState, UniformHalfPiIntervalMatchesQuadrature) {
  const auto e = uniform_samples(pi, pi / 2, 200000);
  const auto kappa = mixed_state(e).coherence();
  EXPECT_NEAR(std::abs(kappa), 2 / pi, 1e-6);
  EXPECT_NEAR(std::abs(kappa), std::abs(oracle::uniform_coherence(pi, pi / 2)), 1e-6);
  EXPECT_NEAR(std::arg(kappa), pi, 1e-9);
}

TEST(MixedState, OppositePhasesDephaseCompletely) {
  PhasorEnsemble e;
  e.add(0.0, 1.0);
  e.add(pi, 1.0);
  EXPECT_NEAR(std::abs(mixed_state(e).coherence()), 0.0, 1e-15);
}

TEST(MixedState, Errors) {
  EXPECT_THROW(mixed_state(PhasorEnsemble{}), DomainError);
  PhasorEnsemble zero;
  zero.add(1.0, 0.0);
  EXPECT_THROW(mixed_state(zero), DomainError);
  PhasorEnsemble e;
  EXPECT_THROW(e.add(1.0, -1.0), DomainError);
  EXPECT_THROW(e.add(NAN, 1.0), DomainError);
}

TEST(TwoQubitState, RejectsInvalidMatrices) {
  Eigen::Matrix4cd m = pure_state(0.3).matrix();
  Eigen::Matrix4cd bad = m;
  bad(1, 0) = {0.1, 0.0};
  EXPECT_THROW(TwoQubitState::from_matrix(bad), DomainError);  // not Hermitian
  bad = m * 1.01;
  EXPECT_THROW(TwoQubitState::from_matrix(bad), DomainError);  // trace
  bad = Eigen::Matrix4cd::Zero();
  bad(0, 0) = 1.5;
  bad(3, 3) = -0.5;
  EXPECT_THROW(TwoQubitState::from_matrix(bad), DomainError);  // negative eigenvalue
  EXPECT_NO_THROW(TwoQubitState::from_matrix(m));
}

TEST(Fidelity, Examples) {
  EXPECT_NEAR(fidelity(pure_state(pi), BellTarget::phi_minus), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(pure_state(0), BellTarget::phi_minus), 0.0, 1e-15);
  EXPECT_NEAR(fidelity(state_from_coherence(std::polar(0.99, pi)), BellTarget::phi_minus), 0.995, 1e-15);
}

TEST(PolarizerSweep, IdealPhiMinus) {
  const auto s = polarizer_sweep(pure_state(pi), {0, pi / 4, pi / 2, 3 * pi / 4});
  const double expected[] = {0.5, 0.0, 0.5, 0.0};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(s.rates[k], expected[k], 1e-12) << k;
  EXPECT_NEAR(s.b_max, 0.5, 1e-12);
  EXPECT_NEAR(s.b_min, 0.0, 1e-12);
  EXPECT_NEAR(visibility(s), 1.0, 1e-12);
}

TEST(PolarizerSweep, DephasedState) {
  const auto rho = state_from_coherence(0.0);
  for (double a = 0; a < pi; a += 0.1) {
    const double c = std::cos(a), s = std::sin(a);
    EXPECT_NEAR(polarizer_rate(rho, a), 0.5 * (std::pow(c, 4) + std::pow(s, 4)), 1e-15);
  }
  EXPECT_NEAR(polarizer_rate(rho, pi / 4), 0.25, 1e-15);
  EXPECT_NEAR(visibility(polarizer_sweep(rho, sweep_angles(1.0))), 1.0 / 3.0, 1e-12);
}

TEST(PolarizerSweep, PartialCoherenceAtFortyFive) {
  EXPECT_NEAR(polarizer_rate(state_from_coherence(-0.98), pi / 4), 0.005, 1e-15);
}

TEST(Visibility, Errors) {
  SweepResult zeros;
  zeros.angles_rad = {0.0, 1.0};
  zeros.rates = {0.0, 0.0};
  EXPECT_THROW(visibility(zeros), DomainError);
  EXPECT_THROW(polarizer_sweep(pure_state(0), {}), DomainError);
  EXPECT_THROW(sweep_angles(0.0), DomainError);
  EXPECT_EQ(sweep_angles(45.0).size(), 5u);
  EXPECT_DOUBLE_EQ(sweep_angles(1.0).back(), pi);
}

TEST(GenerationRate, Inference) {
  EXPECT_NEAR(infer_generation_rate(65000, 0.27, 0.22), 1.09e6, 1e4);
  EXPECT_NEAR(infer_generation_rate(65000, 0.27, 0.22), 65000 / 0.0594, 1e-6);
  EXPECT_EQ(infer_generation_rate(1234.5, 1, 1), 1234.5);
  EXPECT_EQ(infer_generation_rate(0, 0.5, 0.5), 0.0);
  EXPECT_THROW(infer_generation_rate(10, 0.0, 0.5), DomainError);
  EXPECT_THROW(infer_generation_rate(10, 0.5, 1.5), DomainError);
  EXPECT_THROW(infer_generation_rate(-1, 0.5, 0.5), DomainError);
}

TEST(Ensembles, CombineAndDial) {
  PhasorEnsemble a, b;
  a.add(0.1, 2.0);
  a.add(0.2, 1.0);
  b.add(1.0, 0.5);
  b.add(-1.0, 0.25);
  b.add(0.0, 0.25);
  const auto c = combine(a, b);
  ASSERT_EQ(c.size(), 6u);
  EXPECT_NEAR(c.samples()[1].phase_rad, 0.1 - 1.0, 1e-15);
  EXPECT_NEAR(c.samples()[1].weight, 0.5, 1e-15);
  // Independent ensembles: coherences multiply.
  EXPECT_LT(std::abs(c.coherence() - a.coherence() * b.coherence()), 1e-14);
  const double off = dialing_offset(c, BellTarget::phi_minus);
  const auto dialed = c.shifted(off).coherence();
  EXPECT_LT(dialed.real(), 0.0);
  EXPECT_NEAR(dialed.imag(), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c.shifted(off).coherence()), std::abs(c.coherence()), 1e-14);
}

TEST(SpectralEnsemble, GaussianWeightsAndRelativePhases) {
  const Wavelength pump(405), signal(760);
  const auto stack = CrystalStack::parallel_source(6, phase_matching_angle(MaterialId::BBO, pump, signal),
                                                   {kDefaultHwpQuartzMm, kDefaultHwpMgf2Mm}, 0.0);
  const auto e = spectral_ensemble(stack, pump, signal, SpectralSpec{});
  ASSERT_EQ(e.size(), 41u);
  EXPECT_EQ(e.samples()[20].phase_rad, 0.0);
  EXPECT_EQ(e.samples()[20].weight, 1.0);
  // Half maximum at +/- FWHM/2 (sample 25 sits at +2.5 nm).
  EXPECT_NEAR(e.samples()[25].weight, 0.5, 1e-12);
  EXPECT_NEAR(e.samples()[25].phase_rad, phase_at_signal(stack, pump, 762.5) - phase_at_signal(stack, pump, 760), 1e-9);
  EXPECT_LT(e.samples()[25].phase_rad, 0.0);
  const auto mono = spectral_ensemble(stack, pump, signal, SpectralSpec{0.0, 41, 2.0});
  EXPECT_EQ(mono.size(), 1u);
  EXPECT_THROW(spectral_ensemble(stack, pump, signal, SpectralSpec{-1.0, 41, 2.0}), DomainError);
}

TEST(Quality, AcceptanceOutsideGridIsAnError) {
  PhaseMap m;
  m.grid = {0.01, 0.01, 3};
  m.values.assign(9, 0.0);
  AcceptanceSpec ap{AcceptanceSpec::Kind::aperture, 0.001};
  ap.center_azimuth_rad = 0.5;
  PhasorEnsemble spectral;
  spectral.add(0.0, 1.0);
  EXPECT_THROW(evaluate_quality(m, ap, spectral, BellTarget::phi_minus, sweep_angles(1)), DomainError);
}

// ---------------------------------------------------------------- properties

PhasorEnsemble random_ensemble(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 40);
  std::uniform_real_distribution<double> phase(-20, 20), weight(0, 3), center(-pi, pi), width(0, 2);
  PhasorEnsemble e;
  const int n = count(rng);
  const double c = center(rng), w = width(rng);
  for (int k = 0; k < n; ++k) e.add(c + w * phase(rng) / 20, weight(rng) + 1e-3);
  return e;
}

TEST(StateProperty, MixedStatesAreValid) {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 200; ++k) {
    const auto rho = mixed_state(random_ensemble(rng));
    expect_valid_state(rho);
    EXPECT_LE(std::abs(rho.coherence()), 1.0 + 1e-15);
  }
}

TEST(StateProperty, AdCorrelationVisibilityEqualsCoherence) {
  std::mt19937_64 rng(202);
  for (int k = 0; k < 200; ++k) {
    const auto e = random_ensemble(rng);
    const auto dialed = e.shifted(dialing_offset(e, BellTarget::phi_plus));
    const auto rho = mixed_state(dialed);
    EXPECT_NEAR(oracle::ad_visibility(rho.matrix()), std::abs(e.coherence()), 1e-9);
  }
}

TEST(StateProperty, SweepNonNegativeAndPiPeriodic) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> angle(0, pi);
  for (int k = 0; k < 100; ++k) {
    const auto rho = mixed_state(random_ensemble(rng));
    for (int t = 0; t < 10; ++t) {
      const double a = angle(rng);
      const double r = polarizer_rate(rho, a);
      EXPECT_GE(r, 0.0);
      EXPECT_NEAR(r, polarizer_rate(rho, a + pi), 1e-14);
    }
  }
}

TEST(StateProperty, BellFidelitiesSumToAtMostOne) {
  // With only HH and VV populated the two fidelities are (1 -+ Re kappa)/2,
  // so the bound is met with equality for every such state.
  std::mt19937_64 rng(404);
  for (int k = 0; k < 200; ++k) {
    const auto rho = mixed_state(random_ensemble(rng));
    const double sum = fidelity(rho, BellTarget::phi_minus) + fidelity(rho, BellTarget::phi_plus);
    EXPECT_LE(sum, 1.0 + 1e-14);
    EXPECT_NEAR(sum, 1.0, 1e-14);
    EXPECT_NEAR(fidelity(rho, BellTarget::phi_minus), 0.5 * (1 - rho.coherence().real()), 1e-14);
  }
}

TEST(StateProperty, SweepVisibilityFollowsCoherence) {
  // For arg kappa = pi the sweep extremes are 1/2 and (1 - |kappa|)/4.
  for (double k = 0.0; k <= 1.0; k += 0.05) {
    const auto s = polarizer_sweep(state_from_coherence(-k), sweep_angles(0.5));
    EXPECT_NEAR(visibility(s), (1 + k) / (3 - k), 1e-12) << k;
  }
}

TEST(StateProperty, NarrowerSymmetricAcceptanceNeverLowersFidelity) {
  double prev = -1;
  for (double w = 2.0; w > 0.01; w *= 0.7) {
    const auto rho = mixed_state(uniform_samples(pi, w, 401));
    const double f = fidelity(rho, BellTarget::phi_minus);
    EXPECT_GE(f, prev - 1e-15) << w;
    prev = f;
  }
}

TEST(StateProperty, UniformIntervalCoherenceIsSinc) {
  for (double delta : {0.05, 0.3, 1.0, pi / 2, 2.5}) {
    const auto kappa = mixed_state(uniform_samples(pi, delta, 200000)).coherence();
    EXPECT_NEAR(std::abs(kappa), std::sin(delta) / delta, 1e-6) << delta;
    EXPECT_NEAR(std::abs(kappa), std::abs(oracle::uniform_coherence(pi, delta)), 1e-6) << delta;
  }
}

}  // namespace
}  // namespace spdc
