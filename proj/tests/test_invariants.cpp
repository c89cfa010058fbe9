#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracle.hpp"
#include "pinflip/dynamics.hpp"
#include "pinflip/errors.hpp"
#include "pinflip/path.hpp"
#include "pinflip/rng.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/logmath.hpp"
#include "pinflip/metastability.hpp"
#include "pinflip/phase.hpp"
#include "pinflip/spectral.hpp"
#include "pinflip/stats.hpp"

using namespace pinflip;

namespace {

// max/min of exp(v) over a sequence of logs.
struct LogBand {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double ratio() const { return std::exp(hi - lo); }
};

std::vector<int> log_spaced(int a, int b, int count) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    const int n = static_cast<int>(std::lround(a * std::pow(double(b) / a, double(i) / (count - 1))));
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  return out;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(Bands, ExcursionProbabilityDecay) {
  const auto K = renewal_kernels({1, 4.0, 0.0}, 500).K;
  EXPECT_DOUBLE_EQ(K[1], 0.25);
  EXPECT_DOUBLE_EQ(K[2], 1.0 / 16);
  EXPECT_DOUBLE_EQ(K[3], 1.0 / 32);
  // n^{3/2} K(n) falls from 1/4 towards 1/(4 sqrt(pi)) ~ 0.141, so the
  // two-sided band needs a constant of at least ~7.1.
  const double c0 = 8.0;
  for (int n = 1; n <= 500; ++n) {
    const double scaled = K[n] * std::pow(n, 1.5);
    EXPECT_GE(scaled, 1.0 / c0) << n;
    EXPECT_LE(scaled, c0) << n;
  }
  EXPECT_NEAR(K[500] * std::pow(500, 1.5), 0.25 / std::sqrt(M_PI), 1e-3);
}

TEST(Bands, SingleExcursionPartitionFunction) {
  LogBand band;
  for (double s : {0.0, 0.3, 1.0, 2.0}) {
    const double G = free_energy_area(s).G;
    for (int n : log_spaced(10, 500, 30)) {
      const double scale = std::max(1.0 / std::sqrt(n), s);
      band.add(0.5 * std::log(n) + excursion_Z(n, s) - 2.0 * n * G - 2.0 * std::log(scale));
    }
  }
  EXPECT_LE(band.ratio(), 50.0);
}

TEST(Bands, TiltedWalkRepresentation) {
  LogBand band;
  for (double s : {0.0, 0.1, 1.0, 3.0}) {
    for (int N : log_spaced(10, 1000, 25)) {
      const TiltedWalk tw = tilted_walk_positivity(N, s);
      if (N <= 500) EXPECT_NEAR(tw.log_normalizer + tw.log_event_probability, excursion_Z(N, s), 1e-9) << N;
      band.add(tw.log_event_probability + 0.5 * std::log(N) - 2.0 * std::log(std::max(s, 1.0 / std::sqrt(N))));
    }
  }
  EXPECT_LE(band.ratio(), 50.0);
  // No tilt: the event is a plain first return.
  const auto K = renewal_kernels({1, 4.0, 0.0}, 30).K;
  EXPECT_NEAR(tilted_walk_positivity(30, 0.0).log_event_probability, std::log(K[30]), 1e-12);
}

TEST(Bands, BoundaryWeightScaling) {
  for (auto [l, s] : {std::pair{6.0, 3.0}, std::pair{4.0, 1.0}, std::pair{10.0, 2.0}}) {
    const double beta = *activation_energy(l, s).beta_star;
    const double F = free_energy_pinning(l);
    const double G = free_energy_area(beta * s).G;
    LogBand band;
    for (int N = 20; N <= 400; N += 20) {
      band.add(boundary_weight({N, l, s}, beta) - 2.0 * beta * N * G - 2.0 * N * (1.0 - beta) * F - 0.5 * std::log(N));
    }
    EXPECT_LE(band.ratio(), 10.0) << l << " " << s;
  }
}

TEST(Bands, SurrogatePieceWeightsInFastPhase) {
  for (double s : {0.0, 0.3, 0.5}) {
    ASSERT_EQ(phase_point(4.0, s).dynamic_regime, DynamicRegime::kFast);
    for (int N : {10, 20, 40, 60}) {
      const ModelParams prm{N, 4.0, s};
      const ReducedChain red = reduced_lr_chain(prm);
      LogBand band;
      for (std::size_t i = 0; i < red.keys.size(); ++i) {
        band.add(std::log(red.pi_bar[i]) - surrogate_log_weight(prm, red.keys[i].first, red.keys[i].second));
      }
      EXPECT_LE(band.ratio(), 10.0) << N << " " << s;
    }
  }
}

TEST(Variational, RandomTestFunctionsStayAboveGap) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  for (auto [l, s] : {std::pair{6.0, 3.0}, std::pair{1.0, 0.5}}) {
    const auto g = SparseGenerator::build({6, l, s});
    const double gap = spectral_gap(g).gap;
    std::vector<double> f(g.size());
    for (int trial = 0; trial < 50; ++trial) {
      for (double& v : f) v = z(gen);
      EXPECT_GE(dirichlet_rayleigh(g, f).quotient, gap * (1 - 1e-12));
    }
  }
}

TEST(Variational, DenseEigenvectorAttainsGap) {
  const auto g = SparseGenerator::build({6, 4.0, 1.0});
  GapOptions opt;
  opt.want_vector = true;
  const GapResult r = spectral_gap(g, opt);
  EXPECT_EQ(r.method, "dense");
  EXPECT_NEAR(dirichlet_rayleigh(g, r.eigenfunction).quotient, r.gap, 1e-6 * r.gap);
}

TEST(Bottleneck, GrowsWithSizeInSlowPhase) {
  const double beta = *activation_energy(20.0, 2.5).beta_star;
  std::vector<double> logs;
  for (int N : {6, 8, 10, 12}) {
    const BottleneckBound b = bottleneck_bound({N, 20.0, 2.5}, beta);
    ASSERT_FALSE(b.degenerate);
    logs.push_back(b.log_t_rel_lower);
  }
  for (std::size_t i = 1; i < logs.size(); ++i) EXPECT_GT(logs[i], logs[i - 1]);
  // Threshold N - 1 still has a boundary: raising the contact between an
  // (N-1)-excursion and a unit one makes the single arch. Threshold 0 empties E1.
  const BottleneckBound edge = bottleneck_bound({10, 6.0, 3.0}, 0.95);
  EXPECT_FALSE(edge.degenerate);
  EXPECT_TRUE(std::isfinite(edge.t_rel_lower));
  const BottleneckBound none = bottleneck_bound({4, 6.0, 3.0}, 0.2);
  EXPECT_TRUE(none.degenerate);
  EXPECT_TRUE(std::isinf(none.t_rel_lower));
}

TEST(Starred, ReducedMovesAreNearestNeighbour) {
  const ReducedChain red = reduced_lr_chain({10, 6.0, 3.0}, true);
  for (std::size_t i = 0; i < red.keys.size(); ++i) {
    for (std::size_t j = 0; j < red.keys.size(); ++j) {
      if (i == j || red.rates(i, j) == 0.0) continue;
      EXPECT_LE(std::abs(red.keys[i].first - red.keys[j].first), 1);
      EXPECT_LE(std::abs(red.keys[i].second - red.keys[j].second), 1);
    }
  }
}

TEST(Starred, ChainStaysIrreducible) {
  GeneratorOptions opt;
  opt.starred = true;
  for (int N = 2; N <= 12; ++N) {
    const auto g = SparseGenerator::build({N, 6.0, 3.0}, opt);
    EXPECT_TRUE(g.irreducible()) << N;
  }
  const auto two = SparseGenerator::build({2, 3.0, 1.0}, opt);
  EXPECT_NEAR(spectral_gap(two).gap, 1.0, 1e-12);
}

TEST(Mixing, SmallEpsilonSlopeIsRelaxationTime) {
  const MixingResult a = tv_mixing_exact({5, 4.0, 1.0}, 1e-6);
  const MixingResult b = tv_mixing_exact({5, 4.0, 1.0}, 1e-8);
  const double per_decade = (b.t_mix - a.t_mix) / std::log(100.0);
  EXPECT_NEAR(per_decade, a.t_rel, 0.05 * a.t_rel);
  const MixingResult two = tv_mixing_exact({2, 1.0, 0.0}, 0.25);
  EXPECT_NEAR(two.t_mix, std::log(2.0), 1e-4 * std::log(2.0));
}

TEST(Coupling, CoalescenceGrowsSuperPolynomially) {
  std::vector<double> log_n, log_mean;
  for (int N : {6, 10, 14, 18}) {
    const CoalescenceEstimate c = coalescence_mixing_estimate({N, 20.0, 2.5}, 200, 31);
    ASSERT_EQ(c.censored, 0u);
    EXPECT_EQ(c.order_violations, 0u);
    log_n.push_back(std::log(N));
    log_mean.push_back(std::log(c.mean));
  }
  // Local log-log slopes keep increasing.
  std::vector<double> slopes;
  for (std::size_t i = 1; i < log_n.size(); ++i) slopes.push_back((log_mean[i] - log_mean[i - 1]) / (log_n[i] - log_n[i - 1]));
  for (std::size_t i = 1; i < slopes.size(); ++i) EXPECT_GT(slopes[i], slopes[i - 1]);
  EXPECT_GT(slope(log_n, log_mean), 4.0);
}

TEST(Exit, MetastableExitIsExponentialOnGapScale) {
  ExitOptions opt;
  opt.jobs = 4;
  std::vector<double> ks;
  for (int N : {8, 10, 12}) {
    const ExitExperiment ex = exit_time_experiment({N, 20.0, 2.5}, 500, 1, opt);
    ASSERT_TRUE(ex.predicted_from_gap);
    EXPECT_EQ(ex.well, Well::kE2);
    const double ratio = ex.fit.mean / ex.predicted_scale;
    EXPECT_GT(ratio, 1.0 / 3.0) << N;
    EXPECT_LT(ratio, 3.0) << N;
    ks.push_back(ex.ks_unit);
    if (N == 12) {
      EXPECT_GT(ratio, 0.5);
      EXPECT_LT(ratio, 2.0);
      EXPECT_LT(ex.ks_unit, 0.1);
      EXPECT_GT(kolmogorov_pvalue(ex.ks_unit, ex.exit_times.size()), 1e-3);
    }
  }
  // Sharper exponential law with N, up to KS noise at 500 replicas.
  EXPECT_LE(ks[2], ks[0] + 0.03);
  EXPECT_LE(ks[1], ks[0] + 0.03);
}

TEST(PhaseDiagram, LabelsFollowTheAnalyticCurves) {
  // Labels may only disagree with the sign of F - G (or log cosh sigma - F)
  // where a grid neighbour lies on the other side of the curve.
  const int n = 30;
  std::vector<double> ls, ss;
  for (int i = 0; i < n; ++i) ls.push_back(0.5 + 14.5 * i / (n - 1));
  for (int j = 0; j < n; ++j) ss.push_back(4.0 * j / (n - 1));
  auto static_sign = [](double l, double s) {
    const double F = l <= 2.0 ? 0.0 : std::log(l / (2.0 * std::sqrt(l - 1.0)));
    return F - free_energy_area(s).G;
  };
  auto dynamic_sign = [](double l, double s) {
    const double F = l <= 2.0 ? 0.0 : std::log(l / (2.0 * std::sqrt(l - 1.0)));
    return F > 0.0 ? log_cosh(s) - F : -1.0;
  };
  auto straddles = [&](auto sign, int i, int j) {
    const bool here = sign(ls[i], ss[j]) > 0;
    for (auto [di, dj] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
      const int a = i + di, b = j + dj;
      if (a < 0 || b < 0 || a >= n || b >= n) continue;
      if ((sign(ls[a], ss[b]) > 0) != here) return true;
    }
    return false;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const PhasePoint p = phase_point(ls[i], ss[j]);
      if (p.static_regime == StaticRegime::kCritical) continue;
      const bool localized = p.static_regime == StaticRegime::kLocalized;
      if (localized != (static_sign(ls[i], ss[j]) >= 0)) EXPECT_TRUE(straddles(static_sign, i, j));
      const bool slow = p.dynamic_regime == DynamicRegime::kSlow;
      if (slow != (dynamic_sign(ls[i], ss[j]) > 0)) EXPECT_TRUE(straddles(dynamic_sign, i, j));
    }
  }
}

TEST(PhaseProperties, AreaFreeEnergyConvexIncreasing) {
  const double h = 1e-3;
  double prev = -1.0;
  for (int i = 1; i < 400; ++i) {
    const double s = 0.01 * i;
    const double g = free_energy_area(s).G;
    EXPECT_GT(g, prev);
    prev = g;
    const double d2 = (free_energy_area(s + h).G - 2.0 * g + free_energy_area(s - h).G) / (h * h);
    EXPECT_GE(d2, -1e-8) << s;
  }
}

TEST(PhaseProperties, BarrierNonnegativeAndUnimodalInSigma) {
  // Rises while G(sigma) <= F; beyond that E = F - u(beta*) = sigma0^2 G'(sigma0) / sigma.
  for (double l : {0.5, 2.0, 2.5, 4.0, 6.0, 15.0}) {
    const double F = free_energy_pinning(l);
    double prev = 0.0;
    for (int j = 0; j <= 160; ++j) {
      const double s = 0.05 * j;
      const double E = activation_energy(l, s).E;
      EXPECT_GE(E, 0.0);
      if (j > 0 && l > 2.0) {
        if (free_energy_area(s).G <= F) {
          EXPECT_GE(E, prev - 1e-14) << l << " " << s;
        } else if (free_energy_area(s - 0.05).G >= F) {
          EXPECT_LE(E, prev + 1e-14) << l << " " << s;
          const double s0 = sigma0(l);
          EXPECT_NEAR(E * s, s0 * s0 * free_energy_area(s0).Gprime, 1e-10) << l << " " << s;
        }
      }
      prev = E;
    }
  }
}

TEST(PhaseProperties, StationaryPointMinimisesOnGrid) {
  for (auto [l, s] : {std::pair{6.0, 3.0}, std::pair{4.0, 1.0}, std::pair{20.0, 2.5}, std::pair{3.0, 2.0}}) {
    const double F = free_energy_pinning(l);
    auto V = [&](double b) { return b * free_energy_area(b * s).G + (1.0 - b) * F; };
    const double vstar = V(*activation_energy(l, s).beta_star);
    for (int k = 0; k <= 100; ++k) EXPECT_LE(vstar, V(k / 100.0) + 1e-14) << l << " " << s << " " << k;
  }
}

TEST(PhaseProperties, ShapeIsOneLipschitz) {
  const double h = 1e-4;
  for (double s : {0.5, 2.0, 8.0}) {
    for (int i = 0; i + 1 < 20000; ++i) {
      const double u = i * h;
      EXPECT_LE(std::fabs(macroscopic_shape(s, u + h) - macroscopic_shape(s, u)), h * (1 + 1e-9));
    }
  }
}

TEST(ExactProperties, LogPartitionMonotone) {
  for (int N : {3, 10, 40}) {
    for (double s : {0.0, 1.0, 3.0}) {
      double prev = -std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 30; ++i) {
        const double z = partition_function({N, 0.25 * i, s});
        EXPECT_GE(z, prev);
        prev = z;
      }
    }
    for (double l : {0.0, 1.0, 6.0}) {
      double prev = -std::numeric_limits<double>::infinity();
      for (int j = 0; j <= 30; ++j) {
        const double z = partition_function({N, l, 0.2 * j});
        EXPECT_GE(z, prev);
        prev = z;
      }
    }
  }
}

TEST(ExactProperties, FreeEnergyApproachedFromBelow) {
  for (auto [l, s] : {std::pair{4.0, 0.0}, std::pair{0.0, 2.0}, std::pair{1.0, 2.0}, std::pair{6.0, 3.0}}) {
    const double limit = std::max(free_energy_pinning(l), free_energy_area(s).G);
    double prev = -std::numeric_limits<double>::infinity();
    for (int N : {10, 30, 100, 300, 1000, 2000}) {
      const double d = partition_function({N, l, s}) / (2.0 * N) - limit;
      EXPECT_LT(d, 0.0) << l << " " << s << " " << N;
      EXPECT_GT(d, prev);
      prev = d;
    }
  }
}

TEST(ModelProperties, ActiveFlipsAreInvolutions) {
  Philox rng(17, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const int N = 2 + static_cast<int>(uniform_index(rng, 12));
    const PathConfig p = oracle::random_path(N, rng);
    const int x = 1 + static_cast<int>(uniform_index(rng, 2 * N - 1));
    const PathConfig q = corner_flip(p, x);
    if (q != p) EXPECT_EQ(corner_flip(q, x), p);
  }
}

TEST(EigensolverProperties, TwoStateClosedForm) {
  Philox rng(23, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const double p = 0.01 + 5.0 * uniform01(rng);
    const double q = 0.01 + 5.0 * uniform01(rng);
    const auto g = SparseGenerator::from_transitions({0.0, std::log(p / q)}, {{0, 1, p}, {1, 0, q}});
    EXPECT_NEAR(spectral_gap(g).gap, p + q, 1e-12 * (p + q));
  }
}

TEST(EigensolverProperties, ProductChainGapIsMinimum) {
  // Metropolis chains on small random weights, then their independent product.
  Philox rng(29, 0);
  auto factor = [&](int n, std::vector<double>& lw, std::vector<Transition>& tr) {
    lw.assign(n, 0.0);
    for (double& w : lw) w = 2.0 * uniform01(rng);
    for (int i = 0; i + 1 < n; ++i) {
      const double c = 0.2 + uniform01(rng);
      tr.push_back({std::size_t(i), std::size_t(i + 1), c * std::min(1.0, std::exp(lw[i + 1] - lw[i]))});
      tr.push_back({std::size_t(i + 1), std::size_t(i), c * std::min(1.0, std::exp(lw[i] - lw[i + 1]))});
    }
  };
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> la, lb;
    std::vector<Transition> ta, tb;
    factor(4, la, ta);
    factor(5, lb, tb);
    std::vector<double> lw;
    std::vector<Transition> tr;
    const std::size_t nb = lb.size();
    for (std::size_t a = 0; a < la.size(); ++a) {
      for (std::size_t b = 0; b < nb; ++b) lw.push_back(la[a] + lb[b]);
    }
    for (std::size_t a = 0; a < la.size(); ++a) {
      for (const auto& t : tb) tr.push_back({a * nb + t.from, a * nb + t.to, t.rate});
    }
    for (std::size_t b = 0; b < nb; ++b) {
      for (const auto& t : ta) tr.push_back({t.from * nb + b, t.to * nb + b, t.rate});
    }
    const double ga = spectral_gap(SparseGenerator::from_transitions(la, ta)).gap;
    const double gb = spectral_gap(SparseGenerator::from_transitions(lb, tb)).gap;
    const double gp = spectral_gap(SparseGenerator::from_transitions(lw, tr)).gap;
    EXPECT_NEAR(gp, std::min(ga, gb), 1e-10);
  }
}
