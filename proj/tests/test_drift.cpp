#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qkdfinite/drift.hpp"
#include "qkdfinite/errors.hpp"

namespace qkdfinite {
namespace {

TEST(DriftModel, ParseAndValidate) {
  EXPECT_EQ(DriftModel::parse("fixed", 0.3).kind(), DriftKind::kFixed);
  EXPECT_EQ(DriftModel::parse("constant", 0.3).kind(), DriftKind::kConstantVelocity);
  EXPECT_EQ(DriftModel::parse("walk", 0.3).theta_step(), 0.3);
  EXPECT_THROW(DriftModel::parse("spiral", 0.3), Error);
  EXPECT_THROW(DriftModel::constant_velocity(4.0), Error);
  EXPECT_THROW(DriftModel::random_walk(std::nan("")), Error);
  EXPECT_THROW(DriftModel::random_walk(-std::numbers::pi), Error);
  EXPECT_EQ(to_string(DriftKind::kRandomWalk), "walk");
}

TEST(LogCos, SeriesAgreesWithDirectNearThreshold) {
  for (double t : {1.01e-4, 2e-4, 1e-3}) {
    EXPECT_NEAR(log_cos(t), std::log(std::cos(t)), 1e-15);
  }
  // 40-digit reference for ln cos(9.9e-5).
  EXPECT_NEAR(log_cos(9.9e-5), -4.9005000080049661807e-9, 1e-24);
  EXPECT_NEAR(log_cos(0.01), -5.0000833355556232262e-05, 1e-19);
  // Direct evaluation would return exactly 0 here.
  EXPECT_EQ(std::cos(1e-9), 1.0);
  EXPECT_NEAR(log_cos(1e-9), -5e-19, 1e-30);
  EXPECT_EQ(log_cos(-1e-9), log_cos(1e-9));
}

TEST(MeanPhasor, FixedAndZeroTheta) {
  const Phasor p = mean_phasor(DriftModel::fixed(), 12345);
  EXPECT_EQ(p.c_bar, 1.0);
  EXPECT_EQ(p.s_bar, 0.0);
  EXPECT_EQ(mean_phasor(DriftModel::constant_velocity(0.0), 100).c_bar, 1.0);
  EXPECT_THROW(mean_phasor(DriftModel::fixed(), 0), Error);
}

TEST(MeanPhasor, FullCircleCancels) {
  const double theta = 2.0 * std::numbers::pi / 360.0;
  const Phasor p = mean_phasor(DriftModel::constant_velocity(theta), 360);
  EXPECT_NEAR(p.c_bar, 0.0, 1e-12);
  EXPECT_NEAR(p.s_bar, 0.0, 1e-12);
  const Phasor d = direct_sum_phasor(theta, 360);
  EXPECT_NEAR(d.c_bar, 0.0, 1e-12);
  EXPECT_NEAR(d.s_bar, 0.0, 1e-12);
}

TEST(MeanPhasor, ConstantMatchesDirectSum) {
  const Phasor a = mean_phasor(DriftModel::constant_velocity(0.017), 100'000);
  const Phasor b = direct_sum_phasor(0.017, 100'000);
  EXPECT_NEAR(a.c_bar, b.c_bar, 1e-10);
  EXPECT_NEAR(a.s_bar, b.s_bar, 1e-10);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> log_theta(-9.0, 0.0);
  for (int i = 0; i < 40; ++i) {
    const double theta = std::pow(10.0, log_theta(rng));
    const std::uint64_t n = 1 + rng() % 20'000;
    const Phasor c = mean_phasor(DriftModel::constant_velocity(theta), n);
    const Phasor d = direct_sum_phasor(theta, n);
    EXPECT_NEAR(c.c_bar, d.c_bar, 1e-10) << theta << " " << n;
    EXPECT_NEAR(c.s_bar, d.s_bar, 1e-10) << theta << " " << n;
  }
}

TEST(MeanPhasor, RandomWalkIsCosinePower) {
  const Phasor p = mean_phasor(DriftModel::random_walk(0.3), 7);
  EXPECT_NEAR(p.c_bar, std::pow(std::cos(0.3), 7), 1e-15);
  // Negative cosine keeps its sign on odd powers.
  EXPECT_NEAR(mean_phasor(DriftModel::random_walk(2.0), 3).c_bar,
              std::pow(std::cos(2.0), 3), 1e-15);
  // Tiny angle, huge N: decay survives.
  const Phasor q = mean_phasor(DriftModel::random_walk(1e-9), 1'000'000'000'000'000'000ULL);
  EXPECT_NEAR(q.c_bar, std::exp(-0.5), 1e-12);
}

TEST(SmearedC, FactorizationAcrossModels) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double theta = std::pow(10.0, -10.0 + 10.0 * unit(rng));
    const auto n = static_cast<std::uint64_t>(std::pow(10.0, 12.0 * unit(rng))) + 1;
    const double c0 = 2.0 * unit(rng);
    for (const DriftModel& m :
         {DriftModel::fixed(), DriftModel::constant_velocity(theta),
          DriftModel::random_walk(theta)}) {
      const double c = smeared_c(c0, m, n);
      EXPECT_NEAR(c, c0 * mean_phasor(m, n).squared_norm(), 1e-12);
      EXPECT_LE(c, c0);
      EXPECT_GE(c, 0.0);
    }
  }
}

TEST(SmearedC, WalkNonincreasingInN) {
  const DriftModel m = DriftModel::random_walk(1e-5);
  double previous = smeared_c(1.72, m, 1);
  for (std::uint64_t n = 2; n < 100'000'000'000'000ULL; n = n * 3 + 1) {
    const double c = smeared_c(1.72, m, n);
    EXPECT_LE(c, previous);
    previous = c;
  }
}

TEST(SmearedC, Errors) {
  EXPECT_THROW(smeared_c(2.5, DriftModel::fixed(), 10), Error);
  EXPECT_THROW(smeared_c(1.0, DriftModel::fixed(), 0), Error);
}

TEST(RandomWalkDistribution, Basics) {
  EXPECT_EQ(random_walk_distribution(0, 0), 1.0);
  EXPECT_EQ(random_walk_distribution(4, 1), 0.0);
  EXPECT_EQ(random_walk_distribution(4, 6), 0.0);
  EXPECT_NEAR(random_walk_distribution(4, 0), 6.0 / 16.0, 1e-15);
  EXPECT_NEAR(random_walk_distribution(5, -3), 5.0 / 32.0, 1e-15);
}

TEST(RandomWalkDistribution, CharacteristicFunctionIdentity) {
  for (double theta : {0.1, 0.5, 1.0, 2.0}) {
    for (int n = 0; n <= 60; ++n) {
      std::complex<double> acc = 0.0;
      double mass = 0.0;
      for (int d = -n; d <= n; ++d) {
        const double p = random_walk_distribution(n, d);
        acc += p * std::polar(1.0, theta * d);
        mass += p;
      }
      EXPECT_NEAR(mass, 1.0, 1e-12);
      EXPECT_NEAR(acc.real(), std::pow(std::cos(theta), n), 1e-10);
      EXPECT_NEAR(acc.imag(), 0.0, 1e-10);
      const auto exact = oracle::walk_characteristic(theta, n);
      EXPECT_NEAR(acc.real(), static_cast<double>(exact.real()), 1e-12);
    }
  }
}

TEST(DirectSum, Basics) {
  const Phasor p = direct_sum_phasor(0.0, 5);
  EXPECT_EQ(p.c_bar, 1.0);
  EXPECT_EQ(p.s_bar, 0.0);
  EXPECT_THROW(direct_sum_phasor(0.1, kDirectSumMaxSignals + 1), Error);
  try {
    direct_sum_phasor(0.1, kDirectSumMaxSignals + 1);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kScale);
  }
  EXPECT_THROW(direct_sum_phasor(0.1, 0), Error);
}

TEST(ExpectedStepAveraged, MatchesGeometricSum) {
  for (double theta : {1e-7, 0.01, 0.3, 1.5, 2.5}) {
    for (std::uint64_t n : {1ULL, 2ULL, 17ULL, 200ULL, 5000ULL}) {
      EXPECT_NEAR(expected_step_averaged_walk(theta, n),
                  static_cast<double>(oracle::step_averaged_walk(theta, n)), 1e-13)
          << theta << " " << n;
    }
  }
  EXPECT_EQ(expected_step_averaged_walk(0.0, 10), 1.0);
}

TEST(MonteCarlo, AgreesWithAnalyticWithinFiveSigma) {
  const PhasorEstimate e = sample_random_walk_phasor(0.3, 200, 100'000, 42);
  const double expected = expected_step_averaged_walk(0.3, 200);
  EXPECT_LT(std::abs(e.mean.c_bar - expected), 4.0 * e.standard_error.c_bar);
  EXPECT_LT(std::abs(e.mean.s_bar), 5.0 * e.standard_error.s_bar);
  EXPECT_EQ(e.rng_algorithm, "splitmix64");
  EXPECT_EQ(e.trials, 100'000u);
  EXPECT_GE(e.mean_squared_norm, e.mean.squared_norm());
}

TEST(MonteCarlo, DeterministicAndWorkerIndependent) {
  const PhasorEstimate a = sample_random_walk_phasor(0.2, 100, 5000, 9, 1);
  const PhasorEstimate b = sample_random_walk_phasor(0.2, 100, 5000, 9, 3);
  const PhasorEstimate c = sample_random_walk_phasor(0.2, 100, 5000, 9, 8);
  EXPECT_EQ(a.mean.c_bar, b.mean.c_bar);
  EXPECT_EQ(a.mean.c_bar, c.mean.c_bar);
  EXPECT_EQ(a.mean.s_bar, c.mean.s_bar);
  EXPECT_EQ(a.standard_error.c_bar, c.standard_error.c_bar);
}

TEST(MonteCarlo, SeedsDifferButAgreeStatistically) {
  const PhasorEstimate a = sample_random_walk_phasor(0.3, 200, 100'000, 1);
  const PhasorEstimate b = sample_random_walk_phasor(0.3, 200, 100'000, 2);
  EXPECT_NE(a.mean.c_bar, b.mean.c_bar);
  const double joint = std::hypot(a.standard_error.c_bar, b.standard_error.c_bar);
  EXPECT_LT(std::abs(a.mean.c_bar - b.mean.c_bar), 5.0 * joint);
}

TEST(MonteCarlo, Errors) {
  EXPECT_THROW(sample_random_walk_phasor(0.1, 0, 10, 1), Error);
  EXPECT_THROW(sample_random_walk_phasor(0.1, 10, 0, 1), Error);
  const PhasorEstimate one = sample_random_walk_phasor(0.1, 10, 1, 1);
  EXPECT_EQ(one.standard_error.c_bar, 0.0);
}

}  // namespace
}  // namespace qkdfinite
