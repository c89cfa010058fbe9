#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracle.hpp"
#include "pinflip/errors.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/logmath.hpp"
#include "pinflip/phase.hpp"
#include "pinflip/stats.hpp"

using namespace pinflip;

namespace {

const double kLambdas[] = {0.0, 0.5, 1.0, 2.0, 3.0, 6.0};
const double kSigmas[] = {0.0, 0.5, 1.0, 3.0};

// True when lifting some zero of p merges two excursions into one longer than m.
bool leaves_restricted(const oracle::Path& p, int m) {
  const int len = static_cast<int>(p.h.size()) - 1;
  for (int x = 1; x < len; ++x) {
    if (p.h[x] != 0 || p.h[x - 1] != 1 || p.h[x + 1] != 1) continue;
    auto h = p.h;
    h[x] = 2;
    if (oracle::describe(h).lmax > m) return true;
  }
  return false;
}

}  // namespace

TEST(Exact, PartitionFunctionsMatchEnumeration) {
  for (int N = 1; N <= 8; ++N) {
    const auto paths = oracle::all_paths(N);
    for (double l : kLambdas) {
      for (double s : kSigmas) {
        const ModelParams prm{N, l, s};
        const double ref = oracle::log_event(N, l, s, paths, [](const auto&) { return true; });
        EXPECT_LT(oracle::log_gap(ForwardTable(prm).total_logZ(), ref), 1e-10);
        EXPECT_LT(oracle::log_gap(partition_function(prm), ref), 1e-10);
        EXPECT_LT(oracle::log_gap(CompositionModel(prm).logZ(), ref), 1e-10);
      }
    }
  }
}

TEST(Exact, RestrictedAndExceedingWeights) {
  for (int N = 1; N <= 8; ++N) {
    const auto paths = oracle::all_paths(N);
    for (double l : kLambdas) {
      for (double s : kSigmas) {
        const ModelParams prm{N, l, s};
        const CompositionModel model(prm);
        for (int m = 1; m <= N; ++m) {
          const double le = oracle::log_event(N, l, s, paths, [m](const auto& p) { return p.lmax <= m; });
          const double gt = oracle::log_event(N, l, s, paths, [m](const auto& p) { return p.lmax > m; });
          const double eq = oracle::log_event(N, l, s, paths, [m](const auto& p) { return p.lmax == m; });
          const double bd = oracle::log_event(N, l, s, paths,
                                              [m](const auto& p) { return p.lmax <= m && leaves_restricted(p, m); });
          EXPECT_LT(oracle::log_gap(restricted_partition(prm, m), le), 1e-10) << N << " " << m;
          EXPECT_LT(oracle::log_gap(model.log_exceeding(m), gt), 1e-10) << N << " " << m;
          EXPECT_LT(oracle::log_gap(model.log_exact_max(m), eq), 1e-10) << N << " " << m;
          EXPECT_LT(oracle::log_gap(model.log_boundary(m), bd), 1e-10) << N << " " << m << " " << l << " " << s;
        }
      }
    }
  }
}

TEST(Exact, LmaxLawAndMarginals) {
  for (int N = 1; N <= 8; ++N) {
    const auto paths = oracle::all_paths(N);
    for (double l : kLambdas) {
      for (double s : kSigmas) {
        const ModelParams prm{N, l, s};
        const auto pr = oracle::probabilities(N, l, s, paths);
        std::vector<double> law(N + 1, 0.0);
        for (std::size_t i = 0; i < paths.size(); ++i) law[paths[i].lmax] += pr[i];
        const auto got = lmax_distribution(prm);
        for (int k = 1; k <= N; ++k) EXPECT_NEAR(got[k], law[k], 1e-10 * std::max(1.0, law[k]));
        const ForwardTable table(prm, true);
        for (int x = 0; x <= 2 * N; ++x) {
          std::vector<double> marg(std::min(x, 2 * N - x) + 1, 0.0);
          for (std::size_t i = 0; i < paths.size(); ++i) marg[paths[i].h[x]] += pr[i];
          const auto tm = table.site_marginal(x);
          ASSERT_EQ(tm.size(), marg.size());
          for (std::size_t h = 0; h < marg.size(); ++h) EXPECT_NEAR(tm[h], marg[h], 1e-10);
        }
      }
    }
  }
}

TEST(Exact, EventWeightsAndOracleAgree) {
  const ModelParams prm{8, 6.0, 3.0};
  const double beta = *activation_energy(6.0, 3.0).beta_star;
  const EventWeights w = event_weights(prm, beta);
  EXPECT_EQ(w.threshold, 2);
  EXPECT_FALSE(w.degenerate);
  EXPECT_NEAR(log_add(w.logZ_E1, w.logZ_E2), w.logZ, 1e-12);
  const double e1 = event_weight_oracle(prm, [](const PathConfig& p) { return landmarks(p).l_max <= 2; });
  EXPECT_NEAR(w.logZ_E1, e1, 1e-10);
  EXPECT_THROW(event_weight_oracle({11, 1.0, 0.0}, [](const PathConfig&) { return true; }), CapacityError);
  EXPECT_THROW(event_weights(prm, 1.0), ArgumentError);
  EXPECT_TRUE(event_weights({2, 6.0, 3.0}, 0.3).degenerate);
}

TEST(Exact, ClosedForms) {
  for (double l : {0.5, 1.0, 3.0}) {
    for (double s : {0.0, 0.7, 2.0}) {
      EXPECT_NEAR(std::exp(partition_function({1, l, s})), std::exp(s) / 4.0, 1e-12);
      EXPECT_NEAR(std::exp(partition_function({2, l, s})), (l * std::exp(s) + std::exp(2 * s)) / 16.0, 1e-12);
    }
  }
  for (int N = 1; N <= 12; ++N) {
    EXPECT_NEAR(std::exp(partition_function({N, 1.0, 0.0})), oracle::catalan(N) * std::pow(4.0, -N), 1e-12);
  }
}

TEST(Exact, ExcursionWeightsFromOneTable) {
  const double tilt = 0.37;
  const auto ex = excursion_log_weights(15, tilt);
  for (int n = 1; n <= 15; ++n) EXPECT_NEAR(ex[n], excursion_Z(n, tilt * n), 1e-11) << n;
}

TEST(Exact, RenewalKernels) {
  const auto k = renewal_kernels({20, 4.0, 1.0}, 20);
  for (int n = 1; n <= 12; ++n) {
    EXPECT_NEAR(k.K[n], excursion_probability_bruteforce(n), 1e-15);
    EXPECT_NEAR(k.K[n], oracle::catalan(n - 1) * std::pow(4.0, -n), 1e-15);
  }
  EXPECT_THROW(excursion_probability_bruteforce(13), ArgumentError);
}

TEST(Exact, RenewalIdentity) {
  for (auto [l, s] : {std::pair{4.0, 1.0}, std::pair{6.0, 3.0}}) {
    for (int N : {1, 2, 5, 17, 60}) EXPECT_LT(renewal_identity_check({N, l, s}), 1e-9) << N;
  }
  EXPECT_THROW(renewal_identity_check({5, 2.0, 1.0}), DomainError);
}

TEST(Exact, RenewalMassIsOne) {
  EXPECT_LT(renewal_mass_defect(4.0, 500), 1e-6);
  EXPECT_LT(renewal_mass_defect(10.0, 200), 1e-12);
  // Truncation leaves a visible deficit when the tail is heavy.
  EXPECT_GT(renewal_mass_defect(2.05, 50), 1e-3);
  EXPECT_THROW(renewal_mass_defect(1.5, 10), DomainError);
}

TEST(Exact, TiltedWalkRepresentation) {
  for (int N : {1, 3, 10, 40}) {
    for (double s : {0.0, 0.5, 2.0}) {
      const TiltedWalk tw = tilted_walk_positivity(N, s);
      EXPECT_NEAR(tw.log_normalizer + tw.log_event_probability, partition_function({N, 0.0, s}), 1e-10);
    }
  }
  EXPECT_THROW(tilted_walk_positivity(3000, 1.0), CapacityError);
}

TEST(Exact, Caps) {
  ExactCaps caps;
  caps.rolling_max_N = 10;
  caps.full_table_max_N = 10;
  caps.lmax_law_max_N = 10;
  EXPECT_THROW(partition_function({11, 1.0, 1.0}, caps), CapacityError);
  EXPECT_THROW(ForwardTable({11, 1.0, 1.0}, false, caps), CapacityError);
  EXPECT_THROW(lmax_distribution({11, 1.0, 1.0}, caps), CapacityError);
  EXPECT_THROW(restricted_partition({5, 1.0, 1.0}, 0), ArgumentError);
}

TEST(Exact, LargeNStaysFinite) {
  const int N = 20000;
  const double z = partition_function({N, 4.0, 1.0});
  ASSERT_TRUE(std::isfinite(z));
  const double f = std::max(free_energy_pinning(4.0), free_energy_area(1.0).G);
  EXPECT_LT(z / (2.0 * N), f);
  EXPECT_GT(z / (2.0 * N), f - 1e-3);
}

TEST(Sampling, ForwardSamplerMatchesEnumeration) {
  const int N = 5;
  const auto paths = oracle::all_paths(N);
  for (auto [l, s] : {std::pair{3.0, 1.0}, std::pair{0.5, 3.0}}) {
    const auto pr = oracle::probabilities(N, l, s, paths);
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < paths.size(); ++i) index[paths[i].h] = i;
    const ForwardTable table({N, l, s});
    Philox rng(2024, 1);
    std::vector<double> counts(paths.size(), 0.0);
    for (int i = 0; i < 40000; ++i) {
      const auto p = exact_sample(table, rng);
      counts[index.at(std::vector<int>(p.heights().begin(), p.heights().end()))] += 1.0;
    }
    EXPECT_GT(chi_square_test(counts, pr).pvalue, 1e-3);
  }
}

TEST(Sampling, CompositionSamplersMatchConditionedLaws) {
  const int N = 6;
  const auto paths = oracle::all_paths(N);
  const double l = 6.0, s = 3.0;
  const auto pr = oracle::probabilities(N, l, s, paths);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < paths.size(); ++i) index[paths[i].h] = i;
  CompositionSampler sampler({N, l, s});
  Philox rng(7, 3);
  for (int m : {2, 3}) {
    for (bool restricted : {true, false}) {
      std::vector<double> cond(paths.size(), 0.0);
      double total = 0.0;
      for (std::size_t i = 0; i < paths.size(); ++i) {
        if ((paths[i].lmax <= m) == restricted) {
          cond[i] = pr[i];
          total += pr[i];
        }
      }
      for (double& c : cond) c /= total;
      std::vector<double> counts(paths.size(), 0.0);
      for (int i = 0; i < 30000; ++i) {
        const auto p = restricted ? sampler.sample_restricted(m, rng) : sampler.sample_exceeding(m, rng);
        const auto it = index.find(std::vector<int>(p.heights().begin(), p.heights().end()));
        ASSERT_NE(it, index.end());
        ASSERT_GT(cond[it->second], 0.0);
        counts[it->second] += 1.0;
      }
      EXPECT_GT(chi_square_test(counts, cond).pvalue, 1e-3) << m << " " << restricted;
    }
  }
  EXPECT_THROW(sampler.sample_exceeding(N, rng), SamplingError);
  EXPECT_THROW(sampler.sample_restricted(0, rng), SamplingError);
}
