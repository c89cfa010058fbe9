#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracle.hpp"
#include "pinflip/dynamics.hpp"
#include "pinflip/errors.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/spectral.hpp"
#include "pinflip/stats.hpp"

using namespace pinflip;

TEST(Simulator, IncrementalLandmarksMatchFullScan) {
  Philox rng(5, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int N = 2 + static_cast<int>(uniform_index(rng, 14));
    const ModelParams prm{N, 5.0 * uniform01(rng), 3.0 * uniform01(rng)};
    Simulator sim(prm, oracle::random_path(N, rng));
    for (int k = 0; k < 3000; ++k) {
      sim.step(rng);
      if (k % 97) continue;
      const Landmarks m = landmarks(sim.path());
      ASSERT_EQ(sim.H(), m.H);
      ASSERT_EQ(sim.A(), m.A);
      ASSERT_EQ(sim.l_max(), m.l_max);
      ASSERT_EQ(sim.L(), m.L);
      ASSERT_EQ(sim.R(), m.R);
    }
  }
}

TEST(Simulator, ZeroHorizonKeepsInitialState) {
  Philox rng(1, 0);
  const auto start = PathConfig::tent(5);
  const Trajectory t = simulate({5, 2.0, 1.0}, start, 0.0, rng);
  EXPECT_EQ(t.final_state, start);
  ASSERT_EQ(t.checkpoints.size(), 1u);
  EXPECT_EQ(t.checkpoints[0].t, 0.0);
  EXPECT_TRUE(t.events.empty());
  EXPECT_THROW(simulate({5, 2.0, 1.0}, start, -1.0, rng), ArgumentError);
  EXPECT_THROW(simulate({4, 2.0, 1.0}, start, 1.0, rng), ArgumentError);
}

TEST(Simulator, EventsAreLegalFlipsInTimeOrder) {
  Philox rng(9, 2);
  const ModelParams prm{6, 3.0, 1.0};
  SimulateOptions opt;
  opt.record_events = true;
  opt.cadence = 0.5;
  const PathConfig start = PathConfig::zigzag(6);
  const Trajectory t = simulate(prm, start, 50.0, rng, opt);
  ASSERT_FALSE(t.events.empty());
  PathConfig cur = start;
  double last = 0.0;
  for (const auto& e : t.events) {
    EXPECT_GT(e.time, last);
    last = e.time;
    const PathConfig next = corner_flip(cur, static_cast<int>(e.site));
    ASSERT_NE(next, cur);
    ASSERT_EQ(next[static_cast<int>(e.site)], static_cast<int>(e.height));
    cur = next;
  }
  EXPECT_EQ(cur, t.final_state);
  EXPECT_EQ(t.checkpoints.size(), 101u);
  for (std::size_t i = 1; i < t.checkpoints.size(); ++i) EXPECT_GT(t.checkpoints[i].t, t.checkpoints[i - 1].t);

  std::ostringstream bin;
  write_events_binary(bin, t);
  EXPECT_EQ(bin.str().size(), 16 * t.events.size());
  std::ostringstream csv;
  write_checkpoints_csv(csv, t);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "t,H,A,l_max,L,R,in_HN");
}

TEST(Simulator, SameSeedSameTrajectory) {
  const ModelParams prm{7, 2.0, 2.0};
  SimulateOptions opt;
  opt.record_events = true;
  Philox a(77, 4), b(77, 4);
  const auto ta = simulate(prm, PathConfig::tent(7), 20.0, a, opt);
  const auto tb = simulate(prm, PathConfig::tent(7), 20.0, b, opt);
  ASSERT_EQ(ta.events.size(), tb.events.size());
  for (std::size_t i = 0; i < ta.events.size(); ++i) {
    EXPECT_EQ(ta.events[i].time, tb.events[i].time);
    EXPECT_EQ(ta.events[i].site, tb.events[i].site);
  }
}

TEST(Simulator, TwoStateOccupancy) {
  // N = 2, lambda = 1, sigma = 0: the two paths are equally likely.
  Philox rng(123, 0);
  const auto occ = occupancy({2, 1.0, 0.0}, PathConfig::zigzag(2), 1e6, rng);
  ASSERT_EQ(occ.size(), 2u);
  for (const auto& [code, time] : occ) EXPECT_NEAR(time / 1e6, 0.5, 0.01);
}

TEST(Simulator, OccupancyMatchesEquilibrium) {
  const ModelParams prm{4, 3.0, 1.0};
  Philox rng(321, 0);
  const double T = 2e5;
  const auto occ = occupancy(prm, PathConfig::tent(4), T, rng);
  const auto g = SparseGenerator::build(prm);
  const auto mu = g.mu();
  double tv = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto it = occ.find(g.code(i));
    tv += std::fabs((it == occ.end() ? 0.0 : it->second / T) - mu[i]);
  }
  EXPECT_LT(0.5 * tv, 0.02);
}

TEST(Simulator, StationarityFromExactSamples) {
  const ModelParams prm{8, 3.0, 1.0};
  const ForwardTable table(prm);
  Philox rng(55, 0);
  const int reps = 4000;
  double h0 = 0, h1 = 0, a0 = 0, a1 = 0, a0sq = 0;
  for (int r = 0; r < reps; ++r) {
    Simulator sim(prm, exact_sample(table, rng));
    h0 += sim.H();
    a0 += static_cast<double>(sim.A());
    a0sq += static_cast<double>(sim.A()) * static_cast<double>(sim.A());
    sim.run_until(5.0, rng);
    h1 += sim.H();
    a1 += static_cast<double>(sim.A());
  }
  const double sd_a = std::sqrt(a0sq / reps - (a0 / reps) * (a0 / reps));
  EXPECT_LT(std::fabs(a0 - a1) / reps, 5.0 * sd_a * std::sqrt(2.0 / reps));
  EXPECT_LT(std::fabs(h0 - h1) / reps, 0.15);
}

TEST(Coupling, IdenticalCopiesStayIdentical) {
  const FlipRates rates({6, 4.0, 2.0});
  Philox rng(8, 0);
  const auto p = oracle::random_path(6, rng);
  std::vector<std::vector<int>> fam{{p.heights().begin(), p.heights().end()}, {p.heights().begin(), p.heights().end()}};
  for (int k = 0; k < 10000; ++k) {
    grand_coupling_step(fam, 1 + static_cast<int>(uniform_index(rng, 11)), uniform01(rng), rates);
    ASSERT_EQ(fam[0], fam[1]);
  }
}

TEST(Coupling, OrderIsPreserved) {
  // Extremal pair at a slow-phase point, then random ordered pairs everywhere.
  {
    const FlipRates rates({8, 6.0, 3.0});
    Philox rng(99, 0);
    const auto lo = PathConfig::zigzag(8);
    const auto hi = PathConfig::tent(8);
    std::vector<std::vector<int>> fam{{lo.heights().begin(), lo.heights().end()}, {hi.heights().begin(), hi.heights().end()}};
    int violations = 0;
    for (int k = 0; k < 100000; ++k) {
      violations += grand_coupling_step(fam, 1 + static_cast<int>(uniform_index(rng, 15)), uniform01(rng), rates);
    }
    EXPECT_EQ(violations, 0);
    EXPECT_TRUE(PathConfig(fam[0]).below(PathConfig(fam[1])));
  }
  Philox rng(100, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int N = 2 + static_cast<int>(uniform_index(rng, 10));
    const FlipRates rates({N, 8.0 * uniform01(rng), 4.0 * uniform01(rng)});
    auto a = oracle::random_path(N, rng);
    auto b = oracle::random_path(N, rng);
    std::vector<int> lo(a.heights().begin(), a.heights().end());
    std::vector<int> hi(b.heights().begin(), b.heights().end());
    for (std::size_t x = 0; x < lo.size(); ++x) {
      const int m = std::min(lo[x], hi[x]);
      hi[x] = std::max(lo[x], hi[x]);
      lo[x] = m;
    }
    std::vector<std::vector<int>> fam{lo, hi};
    for (int k = 0; k < 2000; ++k) {
      ASSERT_EQ(grand_coupling_step(fam, 1 + static_cast<int>(uniform_index(rng, 2 * N - 1)), uniform01(rng), rates), 0);
    }
  }
}

TEST(Coupling, TwoSiteCoalescenceIsExponential) {
  const auto est = coalescence_mixing_estimate({2, 3.0, 1.0}, 4000, 17);
  EXPECT_EQ(est.order_violations, 0u);
  EXPECT_EQ(est.censored, 0u);
  EXPECT_NEAR(est.mean, 1.0, 0.06);
  EXPECT_GT(kolmogorov_pvalue(ks_exponential(est.times, 1.0), est.times.size()), 1e-3);
  EXPECT_LE(est.ci_low, est.mean);
  EXPECT_GE(est.ci_high, est.mean);
}

TEST(Coupling, CoalescenceTracksMixingTime) {
  const ModelParams prm{6, 1.0, 0.0};
  const auto est = coalescence_mixing_estimate(prm, 400, 3);
  const double tmix = tv_mixing_exact(prm, 0.25).t_mix;
  EXPECT_EQ(est.order_violations, 0u);
  EXPECT_LT(est.mean, 4.0 * tmix);
  EXPECT_GT(est.mean, tmix / 4.0);
}

TEST(Coupling, CensoringAtTheCap) {
  const auto est = coalescence_mixing_estimate({10, 6.0, 3.0}, 5, 1, 1e-3);
  EXPECT_EQ(est.censored, 5u);
  for (double t : est.times) EXPECT_EQ(t, 1e-3);
  EXPECT_THROW(coalescence_mixing_estimate({4, 1.0, 1.0}, 0, 1), ArgumentError);
}

TEST(Simulator, TimeLawMatchesHeatKernel) {
  const ModelParams prm{4, 3.0, 1.0};
  const auto g = SparseGenerator::build(prm);
  const PathConfig start = PathConfig::zigzag(4);
  const auto row = transition_row(g, *g.find(start.code()), 1.0);
  std::vector<double> counts(g.size(), 0.0);
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    Philox rng(4242, static_cast<std::uint64_t>(r));
    Simulator sim(prm, start);
    sim.run_until(1.0, rng);
    counts[*g.find(sim.path().code())] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) tv += std::fabs(counts[i] / reps - row[i]);
  EXPECT_LT(0.5 * tv, 0.03);
}
