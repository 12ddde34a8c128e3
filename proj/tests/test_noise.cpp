#include <gtest/gtest.h>

#include <cmath>

#include "lojsgd/landscapes.hpp"
#include "lojsgd/noise.hpp"

using namespace lojsgd;

namespace {

const QuadraticWell& well() {
  static const QuadraticWell q(ParamVector(5), 1.0);
  return q;
}

// F(theta) = 2 at this point.
ParamVector at_loss_two() { return ParamVector::unit(5, 0, 2.0); }

}  // namespace

TEST(ZDist, DeclaredMoments) {
  const ZDist s(ZKind::sphere, 4, 0.5);
  EXPECT_EQ(s.first_abs_moment(), 0.5);
  EXPECT_EQ(s.second_moment(), 0.25);
  const ZDist g(ZKind::gaussian, 1, 2.0);
  EXPECT_NEAR(g.first_abs_moment(), 2.0 * std::sqrt(2.0 / M_PI), 1e-12);
  EXPECT_THROW(ZDist(ZKind::sphere, 3, 0.0), PreconditionError);
}

TEST(MlScaled, ZeroSigmaIsExactGradient) {
  NoiseModel m = NoiseModel::ml_scaled(0.0);
  RngStream rng(1, 0);
  const ParamVector theta = at_loss_two();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(stochastic_gradient(m, well(), theta, rng), well().gradient(theta));
}

TEST(MlScaled, ZeroLossIsExactGradient) {
  NoiseModel m = NoiseModel::ml_scaled(3.0);
  RngStream rng(1, 0);
  const ParamVector theta(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(norm(stochastic_gradient(m, well(), theta, rng)), 0.0);
  const NoiseMoments mo = empirical_moments(m, well(), theta, 100000, rng);
  EXPECT_EQ(mo.mean_norm, 0.0);
  EXPECT_EQ(mo.second_moment, 0.0);
  EXPECT_EQ(mo.first_abs_moment, 0.0);
}

TEST(MlScaled, SecondMomentIsSigmaF) {
  NoiseModel m = NoiseModel::ml_scaled(1.0);
  RngStream rng(2, 0);
  const NoiseMoments mo = empirical_moments(m, well(), at_loss_two(), 100000, rng);
  // |noise| = sqrt(sigma F) exactly under the unit-sphere base.
  EXPECT_NEAR(mo.second_moment, 2.0, 1e-9);  // summation rounding over 1e5 draws
  EXPECT_LE(mo.mean_norm, 3.0 * std::sqrt(2.0 / 1e5));
}

TEST(MlScaled, AmplitudeIndependentOfDirection) {
  NoiseModel m = NoiseModel::ml_scaled(0.7);
  RngStream rng(3, 0);
  std::vector<double> z(5);
  for (double f : {0.1, 1.0, 9.0}) {
    for (int i = 0; i < 50; ++i) EXPECT_NEAR(m.sample(f, rng, z), std::sqrt(0.7 * f), 1e-15);
  }
}

TEST(BoundedIid, UnbiasedWithinCltBand) {
  const double c = 0.3;
  NoiseModel m = NoiseModel::bounded_iid(ZDist(ZKind::sphere, 5, c));
  RngStream rng(4, 0);
  const NoiseMoments mo = empirical_moments(m, well(), at_loss_two(), 100000, rng);
  EXPECT_LE(mo.mean_norm, 3.0 * c / std::sqrt(1e5));
  EXPECT_NEAR(mo.second_moment, c * c, 1e-9);
}

TEST(BoundedIid, GaussianSecondMomentWithinThreeSe) {
  NoiseModel m = NoiseModel::bounded_iid(ZDist(ZKind::gaussian, 5, 1.0));
  RngStream rng(5, 0);
  const NoiseMoments mo = empirical_moments(m, well(), at_loss_two(), 100000, rng);
  // Var |Z|^2 = 2/d for this scaling.
  EXPECT_NEAR(mo.second_moment, 1.0, 3.0 * std::sqrt(2.0 / 5.0 / 1e5));
}

TEST(AdversarialRotated, EveryDrawAlignedToFirst) {
  NoiseModel m = NoiseModel::adversarial_rotated(ZDist(ZKind::gaussian, 5, 1.0));
  RngStream rng(6, 0);
  std::vector<double> z(5);
  const double first = m.sample(1.0, rng, z);
  const std::vector<double> u = m.direction();
  ASSERT_EQ(u.size(), 5u);
  EXPECT_NEAR(norm(u), 1.0, 1e-15);
  EXPECT_NEAR(dot(z, u), first, 1e-12);
  for (int k = 0; k < 1000; ++k) {
    const double len = m.sample(1.0, rng, z);
    EXPECT_NEAR(dot(z, u), len, 1e-12);
    EXPECT_GE(dot(z, u), 0.0);
  }
}

TEST(AdversarialRotated, FirstAbsMomentMatches) {
  NoiseModel m = NoiseModel::adversarial_rotated(ZDist(ZKind::sphere, 5, 1.0));
  RngStream rng(7, 0);
  const NoiseMoments mo = empirical_moments(m, well(), at_loss_two(), 100000, rng);
  EXPECT_NEAR(mo.first_abs_moment, 1.0, 1e-9);
  EXPECT_LE(mo.max_misalignment, 1e-12);
  // Biased by construction: the mean is the full direction.
  EXPECT_NEAR(mo.mean_norm, 1.0, 1e-9);
}

TEST(AdversarialRotated, ResetClearsDirection) {
  NoiseModel m = NoiseModel::adversarial_rotated(ZDist(ZKind::sphere, 5, 1.0));
  RngStream rng(8, 0);
  std::vector<double> z(5);
  m.sample(0.0, rng, z);
  EXPECT_FALSE(m.direction().empty());
  m.reset();
  EXPECT_TRUE(m.direction().empty());
}

TEST(NoiseModel, NegativeLossIsContractViolation) {
  NoiseModel m = NoiseModel::ml_scaled(1.0);
  RngStream rng(9, 0);
  std::vector<double> z(3);
  EXPECT_THROW(m.sample(-1.0, rng, z), PreconditionError);
}
