#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracle.hpp"
#include "pinflip/errors.hpp"
#include "pinflip/metastability.hpp"
#include "pinflip/phase.hpp"
#include "pinflip/stats.hpp"

using namespace pinflip;

TEST(Conditioned, DrawsSatisfyThePredicate) {
  const ModelParams prm{10, 6.0, 3.0};
  const double beta = *activation_energy(6.0, 3.0).beta_star;
  Philox rng(1, 0);
  for (Well w : {Well::kE1, Well::kE2}) {
    ConditionedSampler s(prm, beta, w);
    for (int i = 0; i < 500; ++i) {
      const int l = landmarks(s.sample(rng)).l_max;
      EXPECT_EQ(in_first_well(l, 10, beta), w == Well::kE1);
    }
  }
  EXPECT_THROW(ConditionedSampler(prm, 0.0, Well::kE1), ArgumentError);
  EXPECT_THROW(ConditionedSampler({2, 6.0, 3.0}, 0.3, Well::kE1), SamplingError);
}

TEST(Conditioned, LawMatchesEnumeration) {
  const int N = 8;
  const double l = 6.0, s = 3.0;
  const double beta = *activation_energy(l, s).beta_star;
  const auto paths = oracle::all_paths(N);
  const auto pr = oracle::probabilities(N, l, s, paths);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < paths.size(); ++i) index[paths[i].h] = i;
  Philox rng(2, 0);
  for (Well w : {Well::kE1, Well::kE2}) {
    std::vector<double> cond(paths.size(), 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if ((paths[i].lmax <= beta * N) == (w == Well::kE1)) {
        cond[i] = pr[i];
        z += pr[i];
      }
    }
    for (double& c : cond) c /= z;
    ConditionedSampler sampler({N, l, s}, beta, w);
    std::vector<double> counts(paths.size(), 0.0);
    for (int i = 0; i < 100000; ++i) {
      const auto p = sampler.sample(rng);
      counts[index.at(std::vector<int>(p.heights().begin(), p.heights().end()))] += 1.0;
    }
    EXPECT_GT(chi_square_test(counts, cond).pvalue, 1e-3) << to_string(w);
  }
}

TEST(Conditioned, RejectionRateMatchesWellMass) {
  // Localized point: E2 is the small well and is reached by rejection.
  const ModelParams prm{10, 6.0, 2.0};
  const Activation a = activation_energy(6.0, 2.0);
  ASSERT_TRUE(a.beta_star.has_value());
  const EventWeights w = event_weights(prm, *a.beta_star);
  const double p2 = std::exp(w.logZ_E2 - w.logZ);
  ConditionedSampler sampler(prm, *a.beta_star, Well::kE2, 100000);
  Philox rng(3, 0);
  const int draws = 3000;
  for (int i = 0; i < draws; ++i) sampler.sample(rng);
  // Attempts per accepted draw are geometric with mean 1/p2.
  const double attempts = static_cast<double>(sampler.rejections() + draws) / draws;
  const double sd = std::sqrt((1.0 - p2) / (p2 * p2) / draws);
  EXPECT_NEAR(attempts, 1.0 / p2, 5.0 * sd);
  EXPECT_EQ(sampler.fallbacks(), 0u);
}

TEST(Conditioned, FallbackAndCap) {
  const ModelParams prm{12, 10.0, 1.2};
  const Activation a = activation_energy(10.0, 1.2);
  ASSERT_TRUE(a.beta_star.has_value());
  Philox rng(4, 0);
  ConditionedSampler strict(prm, *a.beta_star, Well::kE2, 1, false);
  ConditionedSampler loose(prm, *a.beta_star, Well::kE2, 1, true);
  bool threw = false;
  for (int i = 0; i < 50 && !threw; ++i) {
    try {
      strict.sample(rng);
    } catch (const SamplingError&) {
      threw = true;
    }
  }
  EXPECT_TRUE(threw);
  for (int i = 0; i < 50; ++i) EXPECT_GT(landmarks(loose.sample(rng)).l_max, loose.threshold());
  EXPECT_GT(loose.fallbacks(), 0u);
}

TEST(Exit, DegenerateWellsAreRefused) {
  EXPECT_THROW(exit_time_experiment({2, 6.0, 3.0}, 10, 1), DomainError);
  EXPECT_THROW(exit_time_experiment({8, 1.0, 3.0}, 10, 1), DomainError);  // E = 0
}

TEST(Exit, SmallExperimentIsConsistent) {
  ExitOptions opt;
  opt.jobs = 2;
  const ExitExperiment ex = exit_time_experiment({6, 6.0, 3.0}, 300, 11, opt);
  EXPECT_EQ(ex.well, Well::kE1);
  EXPECT_EQ(ex.exit_times.size(), 300u);
  for (double t : ex.exit_times) EXPECT_GT(t, 0.0);
  EXPECT_TRUE(ex.predicted_from_gap);
  EXPECT_GT(ex.fit.rate, 0.0);
  // Same seed, different worker count: identical times.
  opt.jobs = 1;
  const ExitExperiment again = exit_time_experiment({6, 6.0, 3.0}, 300, 11, opt);
  EXPECT_EQ(again.exit_times, ex.exit_times);
}

TEST(Exit, CensoredReplicasAreKept) {
  ExitOptions opt;
  opt.max_time = 0.05;
  opt.compute_gap = false;
  const ExitExperiment ex = exit_time_experiment({8, 6.0, 3.0}, 200, 5, opt);
  std::size_t cens = 0;
  for (bool c : ex.censored) cens += c;
  EXPECT_GT(cens, 0u);
  EXPECT_EQ(ex.fit.censored, cens);
  EXPECT_EQ(ex.exit_times.size(), 200u);
  EXPECT_FALSE(ex.predicted_from_gap);
}
