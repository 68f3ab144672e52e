#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/bayes_oracle.hpp"
#include "psig/sigprob.hpp"

using namespace psig;

TEST(SignatureProbability, DirectSubstitution) {
  EXPECT_NEAR(signature_probability({2.0, 0.25}, 1), 2.0 / 3.0, 1e-15);
}

TEST(SignatureProbability, ZeroRecurrenceRejected) {
  EXPECT_THROW((void)signature_probability({2.0, 1.0}, 0), InvariantError);
}

TEST(SignatureProbability, NearUnitDecayIsFlat) {
  const ProbabilityModel m{1.0 + 1e-12, 0.5};
  for (std::size_t k : {1u, 5u, 100u}) EXPECT_NEAR(signature_probability(m, k), 1.0 / 1.5, 1e-9);
}

TEST(SignatureProbability, StrictlyDecreasingAndInRange) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(1.01, 6.0), lb(-5.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const ProbabilityModel m{ua(rng), std::pow(10.0, lb(rng))};
    double prev = 1.0;
    for (std::size_t k = 1; k < 40; ++k) {
      const double p = signature_probability(m, k);
      EXPECT_LT(p, prev);
      EXPECT_GE(p, 0.0);
      if (p > 0) prev = p;
      else break;  // underflow: a^k b overflowed
    }
  }
}

TEST(SignatureProbability, MatchesBayesComposition) {
  double worst = 0.0;
  for (double lambda : {0.1, 0.5, 1.0, 2.0, 4.0})
    for (double ratio : {1.2, 2.0, 3.5, 8.0})
      for (double c : {0.01, 0.1, 0.5, 0.9})
        for (unsigned k = 1; k <= 25; ++k) {
          const double mu = lambda * ratio;
          const ProbabilityModel m{mu / lambda, std::exp(lambda - mu) * (1 - c) / c};
          const double closed = signature_probability(m, k);
          const double bayes = oracle::bayes_posterior(lambda, mu, c, k);
          worst = std::max(worst, std::abs(closed - bayes) / bayes);
        }
  EXPECT_LT(worst, 1e-12);
}

TEST(MaxRecurrence, StrictBoundaryExcluded) {
  // k=1: 0.667 > 0.5; k=2: exactly 0.5
  const auto cap = max_recurrence({2.0, 0.25}, 0.5);
  EXPECT_EQ(cap.k, 1u);
  EXPECT_FALSE(cap.hit_hard_cap);
}

TEST(MaxRecurrence, NothingPasses) { EXPECT_EQ(max_recurrence({2.0, 4.0}, 0.5).k, 0u); }

TEST(MaxRecurrence, TinyRhoHitsHardCap) {
  const auto cap = max_recurrence({1.0001, 0.01}, 1e-9, 500);
  EXPECT_EQ(cap.k, 500u);
  EXPECT_TRUE(cap.hit_hard_cap);
}

TEST(MaxRecurrence, RhoOutsideUnitIntervalRejected) {
  EXPECT_THROW((void)max_recurrence({2.0, 0.25}, 0.0), ConfigError);
  EXPECT_THROW((void)max_recurrence({2.0, 0.25}, 1.0), ConfigError);
  EXPECT_THROW((void)max_recurrence({1.0, 0.25}, 0.5), ConfigError);
  EXPECT_THROW((void)max_recurrence({2.0, 0.0}, 0.5), ConfigError);
}

TEST(MaxRecurrence, ConsistencyProperty) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(1.001, 10.0), lb(-6.0, 1.0), ur(0.001, 0.999);
  for (int t = 0; t < 1000; ++t) {
    const ProbabilityModel m{ua(rng), std::pow(10.0, lb(rng))};
    const double rho = ur(rng);
    const auto cap = max_recurrence(m, rho);
    if (cap.hit_hard_cap) continue;
    if (cap.k > 0) EXPECT_GT(signature_probability(m, cap.k), rho);
    EXPECT_LE(signature_probability(m, cap.k + 1), rho);
  }
}
