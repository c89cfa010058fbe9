#include "criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <vector>

#include "pinflip/dynamics.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/logmath.hpp"
#include "pinflip/metastability.hpp"
#include "pinflip/parallel.hpp"
#include "pinflip/phase.hpp"
#include "pinflip/spectral.hpp"
#include "pinflip/stats.hpp"

namespace pinflip::acceptance {

namespace {

const double kGridLambdas[] = {0.0, 0.5, 1.0, 2.0, 3.0, 6.0};
const double kGridSigmas[] = {0.0, 0.5, 1.0, 3.0};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

// Relative error of two probabilities through their logs, so 0 == 0 exactly.
double prob_rel_diff(double got, double want) {
  return log_rel_diff(got > 0.0 ? std::log(got) : kNegInf, want > 0.0 ? std::log(want) : kNegInf);
}

struct Enumerated {
  std::vector<PathConfig> paths;
  std::vector<double> log_w;
  std::vector<int> l_max;
};

Enumerated enumerate_weighted(const ModelParams& prm) {
  Enumerated e;
  e.paths = enumerate_paths(prm.N);
  for (const auto& p : e.paths) {
    e.log_w.push_back(log_weight(prm, p));
    e.l_max.push_back(landmarks(p).l_max);
  }
  return e;
}

// 1. DP quantities against brute-force enumeration.
Outcome exactness() {
  Outcome o;
  double worst = 0.0;
  std::string where;
  auto track = [&](double err, const ModelParams& prm, const char* what) {
    if (err > worst) {
      worst = err;
      where = std::string(what) + " at N=" + std::to_string(prm.N) + " lambda=" + num(prm.lambda) +
              " sigma=" + num(prm.sigma);
    }
  };
  for (int N = 1; N <= 8; ++N) {
    for (double l : kGridLambdas) {
      for (double s : kGridSigmas) {
        const ModelParams prm{N, l, s};
        const Enumerated en = enumerate_weighted(prm);
        const double logZ = log_sum_exp(en.log_w);
        track(log_rel_diff(partition_function(prm), logZ), prm, "logZ");

        const CompositionModel model(prm);
        track(log_rel_diff(model.logZ(), logZ), prm, "composition logZ");
        for (int m = 1; m <= N; ++m) {
          double below = kNegInf, above = kNegInf, boundary = kNegInf;
          for (std::size_t i = 0; i < en.paths.size(); ++i) {
            if (en.l_max[i] > m) {
              above = log_add(above, en.log_w[i]);
              continue;
            }
            below = log_add(below, en.log_w[i]);
            for (int x = 1; x < 2 * N; ++x) {
              if (landmarks(corner_flip(en.paths[i], x)).l_max > m) {
                boundary = log_add(boundary, en.log_w[i]);
                break;
              }
            }
          }
          track(log_rel_diff(restricted_partition(prm, m), below), prm, "restricted");
          track(log_rel_diff(model.log_exceeding(m), above), prm, "exceeding");
          track(log_rel_diff(model.log_boundary(m), boundary), prm, "boundary");
        }

        std::vector<double> law(static_cast<std::size_t>(N) + 1, 0.0);
        for (std::size_t i = 0; i < en.paths.size(); ++i) law[en.l_max[i]] += std::exp(en.log_w[i] - logZ);
        const auto dp_law = lmax_distribution(prm);
        for (int k = 0; k <= N; ++k) track(prob_rel_diff(dp_law[k], law[k]), prm, "l_max law");

        const ForwardTable table(prm, true);
        for (int x = 0; x <= 2 * N; ++x) {
          std::vector<double> marg(static_cast<std::size_t>(std::min(x, 2 * N - x)) + 1, 0.0);
          for (std::size_t i = 0; i < en.paths.size(); ++i) marg[en.paths[i][x]] += std::exp(en.log_w[i] - logZ);
          const auto dp = table.site_marginal(x);
          for (std::size_t h = 0; h < marg.size(); ++h) track(prob_rel_diff(dp[h], marg[h]), prm, "marginal");
        }
      }
    }
  }
  o.pass = worst <= 1e-10;
  o.detail = "max rel err " + num(worst) + " (tol 1e-10)" + (where.empty() ? "" : ", worst " + where);
  return o;
}

// 2. Closed forms for N = 1, 2 and the unweighted Catalan count.
Outcome closed_forms() {
  Outcome o;
  double worst = 0.0;
  for (double l : kGridLambdas) {
    for (double s : kGridSigmas) {
      const double z1 = std::exp(s) / 4.0;
      const double z2 = (l * std::exp(s) + std::exp(2.0 * s)) / 16.0;
      worst = std::max(worst, std::fabs(std::exp(partition_function({1, l, s})) - z1) / z1);
      worst = std::max(worst, std::fabs(std::exp(partition_function({2, l, s})) - z2) / z2);
    }
  }
  double cat = 1.0;  // C_0
  for (int N = 1; N <= 12; ++N) {
    cat = cat * 2.0 * (2.0 * N - 1.0) / (N + 1.0);
    const double want = cat * std::pow(4.0, -N);
    worst = std::max(worst, std::fabs(std::exp(partition_function({N, 1.0, 0.0})) - want) / want);
  }
  o.pass = worst <= 1e-12;
  o.detail = "max rel err " + num(worst) + " (tol 1e-12)";
  return o;
}

// 3. Renewal decomposition and normalisation of the pinned kernel.
Outcome renewal() {
  Outcome o;
  double worst = 0.0;
  for (auto [l, s] : {std::pair{4.0, 1.0}, std::pair{6.0, 3.0}}) {
    for (int N = 1; N <= 200; ++N) worst = std::max(worst, renewal_identity_check({N, l, s}));
  }
  const double mass = renewal_mass_defect(4.0, 500);
  o.pass = worst < 1e-9 && mass < 1e-6;
  o.detail = "identity defect " + num(worst) + " (tol 1e-9), kernel mass defect " + num(mass) + " (tol 1e-6)";
  return o;
}

// 4. Partition functions stay within a factor-10 band around their exponential rates.
Outcome free_energy_bands() {
  Outcome o;
  std::vector<int> Ns;
  for (int k = 0; k < 40; ++k) {
    const int N = static_cast<int>(std::lround(10.0 * std::pow(200.0, k / 39.0)));
    if (Ns.empty() || Ns.back() != N) Ns.push_back(N);
  }
  const double F4 = free_energy_pinning(4.0);
  const double G2 = free_energy_area(2.0).G;
  double lo[3], hi[3];
  std::fill(lo, lo + 3, 1e300);
  std::fill(hi, hi + 3, -1e300);
  for (int N : Ns) {
    const double half_log_n = 0.5 * std::log(static_cast<double>(N));
    const double v[3] = {partition_function({N, 4.0, 0.0}) - 2.0 * N * F4,
                         half_log_n + partition_function({N, 0.0, 2.0}) - 2.0 * N * G2,
                         half_log_n + partition_function({N, 1.0, 2.0}) - 2.0 * N * G2};
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  }
  double ratio[3];
  for (int i = 0; i < 3; ++i) ratio[i] = std::exp(hi[i] - lo[i]);
  o.pass = ratio[0] <= 10.0 && ratio[1] <= 10.0 && ratio[2] <= 10.0;
  o.detail = "band ratios pinned " + num(ratio[0]) + ", area " + num(ratio[1]) + ", mixed " + num(ratio[2]) +
             " (max 10) over " + std::to_string(Ns.size()) + " N in [10,2000]";
  return o;
}

// 5. Free-energy identity, stationarity root, and the sign of the barrier.
Outcome analytic_identities() {
  Outcome o;
  double identity = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double s = 1e-3 * std::pow(2e4, i / 399.0);
    const AreaFreeEnergy g = free_energy_area(s);
    identity = std::max(identity, std::fabs(g.G + s * g.Gprime - log_cosh(s)));
  }

  double residual = 0.0, stationarity = 0.0, threshold = 0.0;
  int slow = 0;
  for (double l : linspace(2.5, 15.0, 40)) {
    const double s0 = sigma0(l);
    const double F = free_energy_pinning(l);
    for (double s : linspace(0.1, 4.0, 40)) {
      const Activation a = activation_energy(l, s);
      if (!(a.E > 0.0)) continue;
      ++slow;
      const double b = *a.beta_star;
      residual = std::max(residual, std::fabs(a.stationarity_residual));
      const AreaFreeEnergy g = free_energy_area(b * s);
      stationarity = std::max(stationarity, std::fabs(g.G + b * s * g.Gprime - F));
      threshold = std::max(threshold, std::fabs(s * b - s0));
    }
  }

  // Barrier sign against log cosh(sigma) > F(lambda) > 0 on a 40 x 40 grid.
  int sign_mismatch = 0, literal_mismatch = 0, literal_outside = 0;
  for (double l : linspace(0.5, 15.0, 40)) {
    const double F = free_energy_pinning(l);
    for (double s : linspace(0.0, 4.0, 40)) {
      const double E = activation_energy(l, s).E;
      const bool slow_expected = log_cosh(s) > F && F > 0.0;
      if (slow_expected != (E > 0.0) || (!slow_expected && E != 0.0)) ++sign_mismatch;
      if ((E == 0.0) != (log_cosh(s) <= F)) {
        ++literal_mismatch;
        if (l > 2.0) ++literal_outside;
      }
    }
  }
  o.pass = identity < 1e-9 && residual < 1e-10 && stationarity < 1e-9 && threshold < 1e-9 && slow > 0 &&
           sign_mismatch == 0 && literal_outside == 0;
  o.detail = "G+sG'-logcosh " + num(identity) + " (tol 1e-9); root residual " + num(residual) +
             " (tol 1e-10), stationarity " + num(stationarity) + ", s*beta-s0 " + num(threshold) +
             " (tol 1e-9) on " + std::to_string(slow) + " slow points; barrier sign mismatches " +
             std::to_string(sign_mismatch) + "/1600 (E>0 iff logcosh s > F > 0); F=0 points where E=0 although logcosh s > F: " +
             std::to_string(literal_mismatch);
  return o;
}

// 6. Two-site gap, the unpinned lower bound, reversibility, product-chain pieces.
Outcome spectral_ground_truths() {
  Outcome o;
  double two = 0.0;
  for (double l : {0.5, 3.0, 10.0}) {
    for (double s : {0.0, 1.0, 3.0}) two = std::max(two, std::fabs(spectral_gap(SparseGenerator::build({2, l, s})).gap - 1.0));
  }
  double wilson_slack = 1e300;
  for (int n = 2; n <= 10; ++n) {
    for (double s : {0.5, 1.0, 2.0}) {
      wilson_slack = std::min(wilson_slack, spectral_gap(SparseGenerator::build({n, 0.0, s})).gap - wilson_bound(n));
    }
  }
  double reversibility = 0.0, product = 0.0;
  for (int N = 2; N <= 8; ++N) {
    for (double l : kGridLambdas) {
      for (double s : kGridSigmas) {
        const ModelParams prm{N, l, s};
        const auto g = SparseGenerator::build(prm);
        reversibility = std::max(reversibility, g.reversibility_defect());
        if (l != 3.0 && l != 6.0) continue;
        std::vector<std::pair<int, int>> keys;
        const auto labels = lr_labels(g, &keys);
        std::vector<std::vector<std::size_t>> members(keys.size());
        for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
        for (std::size_t k = 0; k < keys.size(); ++k) {
          const double direct = spectral_gap(g.restrict_to(members[k])).gap;
          const double factored = lr_piece_product_gap(prm, keys[k].first, keys[k].second);
          if (std::isinf(direct) && std::isinf(factored)) continue;
          product = std::max(product, std::fabs(direct - factored));
        }
      }
    }
  }
  o.pass = two <= 1e-10 && wilson_slack >= 0.0 && reversibility <= 1e-12 && product <= 1e-10;
  o.detail = "N=2 |gap-1| " + num(two) + " (tol 1e-10); min gap-wilson " + num(wilson_slack) +
             "; detailed balance defect " + num(reversibility) + " (tol 1e-12); product-chain gap err " +
             num(product) + " (tol 1e-10)";
  return o;
}

// 7. Every lower bound sits below the exact gap-derived quantity.
Outcome bound_hierarchy() {
  Outcome o;
  const double tol = 1e-9;
  int checked = 0, violations = 0;
  std::string first;
  auto check = [&](bool ok, const ModelParams& prm, const char* what) {
    ++checked;
    if (ok) return;
    if (violations++ == 0) {
      first = std::string(what) + " at N=" + std::to_string(prm.N) + " lambda=" + num(prm.lambda) +
              " sigma=" + num(prm.sigma);
    }
  };
  for (int N = 2; N <= 8; ++N) {
    for (double l : kGridLambdas) {
      for (double s : kGridSigmas) {
        const ModelParams prm{N, l, s};
        const auto g = SparseGenerator::build(prm);
        if (g.size() < 2) continue;
        const double gap = spectral_gap(g).gap;

        check(jerrum_check(g, lr_labels(g)).holds, prm, "jerrum");

        const ReducedChain red = reduced_lr_chain(prm);
        if (red.keys.size() >= 2) {
          const CheegerResult ch = cheeger_bound(red);
          const double red_gap = spectral_gap(red.as_generator()).gap;
          check(red_gap >= ch.bound * (1 - tol), prm, "cheeger");
        }

        for (double a : {-0.5, 0.5, 1.0}) {
          check(dirichlet_rayleigh(g, area_test_function(g, a)).quotient >= gap * (1 - tol), prm, "f_a quotient");
        }

        std::vector<double> betas{0.3, 0.5, 0.7};
        if (auto b = activation_energy(l, s).beta_star) betas.push_back(*b);
        for (double beta : betas) {
          const BottleneckBound b = bottleneck_bound(prm, beta);
          if (b.degenerate) continue;
          check(b.t_rel_lower <= (1.0 / gap) * (1 + tol), prm, "bottleneck");
        }
        check(star_chain_gap(prm) <= gap * (1 + tol), prm, "star chain");
      }
    }
  }
  for (int N = 9; N <= 12; ++N) {
    for (auto [l, s] : {std::pair{6.0, 3.0}, std::pair{1.0, 0.5}, std::pair{3.0, 1.0}}) {
      const ModelParams prm{N, l, s};
      const double gap = spectral_gap(SparseGenerator::build(prm)).gap;
      check(star_chain_gap(prm) <= gap * (1 + tol), prm, "star chain");
    }
  }
  o.pass = violations == 0;
  o.detail = std::to_string(checked) + " inequalities checked, " + std::to_string(violations) + " violated" +
             (first.empty() ? "" : " (first: " + first + ")");
  return o;
}

// 8. Finite-size trend of the relaxation time in both dynamic phases.
Outcome relaxation_trend() {
  Outcome o;
  const double E = activation_energy(6.0, 3.0).E;
  std::vector<double> rate;
  for (int N : {4, 6, 8, 10, 12}) {
    const double t_rel = 1.0 / spectral_gap(SparseGenerator::build({N, 6.0, 3.0})).gap;
    rate.push_back(std::log(t_rel) / (2.0 * N));
  }
  bool increasing = true;
  for (std::size_t i = 1; i < rate.size(); ++i) increasing = increasing && rate[i] > rate[i - 1];
  const double last = rate.back();
  const bool in_band = last >= 0.5 * E && last <= 1.5 * E;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int N = 4; N <= 12; ++N) {
    const double x = std::log(static_cast<double>(N));
    const double y = std::log(1.0 / spectral_gap(SparseGenerator::build({N, 6.0, 0.3})).gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  std::string seq;
  for (double r : rate) seq += (seq.empty() ? "" : ",") + num(r);
  o.pass = increasing && in_band && slope <= 4.0;
  o.detail = "slow (6,3): log(T_rel)/2N = [" + seq + "] " + (increasing ? "increasing" : "not increasing") +
             ", last " + num(last) + " vs band [" + num(0.5 * E) + "," + num(1.5 * E) + "]; fast (6,0.3) slope " +
             num(slope) + " (max 4)";
  return o;
}

// 9. Exact mixing time between the relaxation-time bounds.
Outcome mixing_sandwich() {
  Outcome o;
  int cases = 0, bad = 0;
  for (int N = 2; N <= 6; ++N) {
    for (double l : {1.0, 4.0}) {
      for (double s : {0.0, 1.0}) {
        const MixingResult m = tv_mixing_exact({N, l, s}, 0.25);
        ++cases;
        if (!(m.t_mix >= m.lower * (1 - 1e-9) && m.t_mix <= m.upper * (1 + 1e-9))) ++bad;
      }
    }
  }
  o.pass = bad == 0;
  o.detail = std::to_string(cases - bad) + "/" + std::to_string(cases) + " cases inside [T_rel log(2), T_rel log(4/mu_min)]";
  return o;
}

// 10. Macroscopic shape of exact equilibrium samples at N = 300.
Outcome shape() {
  Outcome o;
  const int N = 300, draws = 200;
  int close = 0;
  {
    const ForwardTable table({N, 1.0, 2.0});
    for (int r = 0; r < draws; ++r) {
      Philox rng(1010, static_cast<std::uint64_t>(r));
      const PathConfig p = exact_sample(table, rng);
      double sup = 0.0;
      for (int x = 0; x <= 2 * N; ++x) {
        sup = std::max(sup, std::fabs(p[x] / static_cast<double>(N) - macroscopic_shape(2.0, x / static_cast<double>(N))));
      }
      if (sup < 0.1) ++close;
    }
  }
  int flat = 0;
  {
    const ForwardTable table({N, 6.0, 0.3});
    for (int r = 0; r < draws; ++r) {
      Philox rng(1011, static_cast<std::uint64_t>(r));
      const PathConfig p = exact_sample(table, rng);
      const auto h = p.heights();
      if (*std::max_element(h.begin(), h.end()) < 0.1 * N) ++flat;
    }
  }
  o.pass = close >= 0.95 * draws && flat >= 0.95 * draws;
  o.detail = "delocalized (1,2): " + std::to_string(close) + "/200 within 0.1 of the limit shape; localized (6,0.3): " +
             std::to_string(flat) + "/200 with max height < 0.1N (need 190)";
  return o;
}

// 11. Exit from the metastable well at a slow-phase point with 2NE <= 6.
Outcome metastability(int jobs) {
  Outcome o;
  const ModelParams prm{12, 20.0, 2.5};
  const double E = activation_energy(prm.lambda, prm.sigma).E;
  ExitOptions opt;
  opt.jobs = jobs;
  opt.max_time = 1e7;
  const ExitExperiment ex = exit_time_experiment(prm, 500, 1111, opt);
  const double ratio = ex.fit.mean * *ex.gap;
  o.pass = 2.0 * prm.N * E <= 6.0 && ex.predicted_from_gap && ex.ks_unit < 0.1 && ratio >= 1.0 / 3.0 && ratio <= 3.0;
  o.detail = "N=12 lambda=20 sigma=2.5 (2NE=" + num(2.0 * prm.N * E) + ", well " + to_string(ex.well) + "): KS " +
             num(ex.ks_unit) + " (max 0.1), mean exit * gap " + num(ratio) + " (within [1/3,3]), censored " +
             std::to_string(ex.fit.censored) + "/500";
  return o;
}

// 12. Simulator law at fixed time, occupancy, and coupling monotonicity.
Outcome simulator(int jobs) {
  Outcome o;
  const ModelParams prm{4, 3.0, 1.0};
  const auto g = SparseGenerator::build(prm);
  const PathConfig start = PathConfig::zigzag(4);
  const auto row = transition_row(g, *g.find(start.code()), 1.0);
  const int reps = 100000;
  std::vector<std::size_t> final_index(reps);
  run_strided(reps, jobs, [&](int first, int stride) {
    for (int r = first; r < reps; r += stride) {
      Philox rng(1212, static_cast<std::uint64_t>(r));
      Simulator sim(prm, start);
      sim.run_until(1.0, rng);
      final_index[static_cast<std::size_t>(r)] = *g.find(sim.path().code());
    }
  });
  std::vector<double> counts(g.size(), 0.0);
  for (std::size_t i : final_index) counts[i] += 1.0;
  double tv_law = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) tv_law += 0.5 * std::fabs(counts[i] / reps - row[i]);

  Philox occ_rng(1213, 0);
  const double T = 1e6;
  const auto occ = occupancy(prm, PathConfig::tent(4), T, occ_rng);
  const auto mu = g.mu();
  double tv_occ = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto it = occ.find(g.code(i));
    tv_occ += 0.5 * std::fabs((it == occ.end() ? 0.0 : it->second / T) - mu[i]);
  }

  std::uint64_t violations = 0;
  violations += coalescence_mixing_estimate({2, 3.0, 1.0}, 1000, 1214).order_violations;
  violations += coalescence_mixing_estimate({6, 1.0, 0.0}, 400, 1215).order_violations;
  violations += coalescence_mixing_estimate({8, 6.0, 3.0}, 200, 1216).order_violations;
  {
    const FlipRates rates({8, 6.0, 3.0});
    Philox rng(1217, 0);
    const auto lo = PathConfig::zigzag(8);
    const auto hi = PathConfig::tent(8);
    std::vector<std::vector<int>> fam{{lo.heights().begin(), lo.heights().end()}, {hi.heights().begin(), hi.heights().end()}};
    for (int k = 0; k < 100000; ++k) {
      violations += static_cast<std::uint64_t>(
          grand_coupling_step(fam, 1 + static_cast<int>(uniform_index(rng, 15)), uniform01(rng), rates));
    }
  }
  o.pass = tv_law <= 0.02 && tv_occ <= 0.01 && violations == 0;
  o.detail = "time-1 law TV " + num(tv_law) + " (max 0.02, 1e5 replicas); occupancy TV " + num(tv_occ) +
             " (max 0.01, 1e6 time units); coupling order violations " + std::to_string(violations);
  return o;
}

}  // namespace

const char* criterion_name(int id) {
  static const char* const names[] = {"exactness",          "closed-forms",     "renewal",
                                      "free-energy-bands",  "analytic",         "spectral-ground-truths",
                                      "bound-hierarchy",    "relaxation-trend", "mixing-sandwich",
                                      "shape",              "metastability",    "simulator"};
  return id >= 1 && id <= kCriterionCount ? names[id - 1] : "unknown";
}

Outcome run_criterion(int id, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  // Wall-clock budgets in seconds; 0 means none was set.
  double budget = 0.0;
  try {
    switch (id) {
      case 1: o = exactness(); budget = 60; break;
      case 2: o = closed_forms(); break;
      case 3: o = renewal(); break;
      case 4: o = free_energy_bands(); budget = 300; break;
      case 5: o = analytic_identities(); break;
      case 6: o = spectral_ground_truths(); break;
      case 7: o = bound_hierarchy(); break;
      case 8: o = relaxation_trend(); budget = 1800; break;
      case 9: o = mixing_sandwich(); break;
      case 10: o = shape(); break;
      case 11: o = metastability(jobs); budget = 1800; break;
      case 12: o = simulator(jobs); break;
      default: o.detail = "no such criterion"; break;
    }
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("error: ") + e.what();
  }
  o.id = id;
  o.name = criterion_name(id);
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget > 0.0 && o.seconds > budget) {
    o.pass = false;
    o.detail += "; over the " + num(budget) + " s budget";
  }
  return o;
}

std::string format_line(const Outcome& outcome) {
  char head[64];
  std::snprintf(head, sizeof head, "%s %2d %-22s ", outcome.pass ? "PASS" : "FAIL", outcome.id, outcome.name.c_str());
  char tail[32];
  std::snprintf(tail, sizeof tail, " [%.1f s]", outcome.seconds);
  return head + outcome.detail + tail;
}

}  // namespace pinflip::acceptance
