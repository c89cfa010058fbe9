#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "pinflip/path.hpp"
#include "pinflip/rng.hpp"

namespace pinflip {

struct ExactCaps {
  int full_table_max_N = 10000;   // forward/backward tables kept in memory
  int rolling_max_N = 1000000;    // log Z only, O(N) memory
  int lmax_law_max_N = 10000;
};

// Log-domain transfer-matrix table over (x, h), 0 <= h <= min(x, 2N - x),
// h = x mod 2. Entry (x, h) is the log weight of all partial paths on 0..x
// ending at height h, including the site factors of sites 1..x.
class ForwardTable {
 public:
  explicit ForwardTable(const ModelParams& params, bool with_backward = false, const ExactCaps& caps = {});

  const ModelParams& params() const { return params_; }
  double log_forward(int x, int h) const;
  // Weight of sites x+1..2N given height h at x; requires with_backward.
  double log_backward(int x, int h) const;
  double total_logZ() const { return log_forward(2 * params_.N, 0); }

  // P(xi_x = h) for h = 0..min(x, 2N - x); requires with_backward.
  std::vector<double> site_marginal(int x) const;

  // Exact draw from the equilibrium law, sampled backwards from x = 2N.
  PathConfig sample(Philox& rng) const;

 private:
  std::size_t index(int x, int h) const;
  bool in_range(int x, int h) const;

  ModelParams params_;
  std::vector<std::size_t> offset_;
  std::vector<double> fwd_;
  std::vector<double> bwd_;
};

// log of the per-site factor (1/2) e^{tilt h} lambda^{[h = 0, 0 < x < 2N]}.
double log_site_factor(const ModelParams& params, int x, int h);

// log Z_N(lambda, sigma) with O(N) memory.
double partition_function(const ModelParams& params, const ExactCaps& caps = {});

// log Z_n(0, sigma_eff): a single excursion of half-length n.
double excursion_Z(int n, double sigma_eff);

// log Z_n(0, n * tilt) for n = 1..n_max from one free-end DP; entry 0 is -inf.
std::vector<double> excursion_log_weights(int n_max, double site_tilt);

// Renewal (excursion-composition) view of the model at fixed (N, lambda, sigma).
// Every path is a sequence of excursions with half-lengths n_1 + ... + n_k = N,
// weighted lambda^{k-1} prod ex(n_i).
class CompositionModel {
 public:
  explicit CompositionModel(const ModelParams& params);

  const ModelParams& params() const { return params_; }
  int N() const { return params_.N; }
  double log_lambda() const { return log_lambda_; }
  double log_excursion(int n) const { return ex_[static_cast<std::size_t>(n)]; }

  // Largest integer l with l <= beta N (same comparison as in_first_well).
  int threshold(double beta) const;

  // log weight of segments of half-length j whose parts are all <= m, j = 0..N.
  // Entry 0 is the empty segment (log weight 0).
  std::vector<double> pinned_weights(int m) const;
  // Same, restricted to segments with at least one part > m; entry 0 is -inf.
  std::vector<double> exceeding_weights(int m) const;

  double logZ() const;
  double log_restricted(int m) const;            // l_max <= m
  double log_exceeding(int m) const;             // l_max > m, computed directly
  double log_exact_max(int m) const;             // l_max == m
  // l_max <= m and some adjacent pair of excursions has combined half-length > m,
  // i.e. a single flip at their common zero leaves E1.
  double log_boundary(int m) const;

 private:
  ModelParams params_;
  double log_lambda_;
  std::vector<double> ex_;
};

double restricted_partition(const ModelParams& params, int max_half_excursion);

// P(l_max = l) for l = 1..N (index 0 unused, always 0).
std::vector<double> lmax_distribution(const ModelParams& params, const ExactCaps& caps = {});

struct EventWeights {
  double logZ = 0.0;
  double logZ_E1 = 0.0;
  double logZ_E2 = 0.0;
  double logZ_boundary = 0.0;
  int threshold = 0;        // largest admissible l_max in E1
  bool degenerate = false;  // E1 or E2 is empty
};

EventWeights event_weights(const ModelParams& params, double beta_star);

// log Z of E1 paths having at least one corner flip that leaves E1. Exact event
// weight, not the union bound.
double boundary_weight(const ModelParams& params, double beta_star);

std::vector<double> site_marginal(const ModelParams& params, int x);
PathConfig exact_sample(const ForwardTable& table, Philox& rng);

struct RenewalKernels {
  std::vector<double> K;           // K[n] = Catalan(n-1) 4^{-n}, index 0 unused
  std::vector<double> log_Ktilde;  // log(lambda e^{-2nF} Z_n(0, n sigma / N))
};

RenewalKernels renewal_kernels(const ModelParams& params, int n_max);

// P(S_1 > 0, ..., S_{2n-1} > 0, S_{2n} = 0) for simple random walk by counting
// all 2^{2n} increment sequences; n <= 12.
double excursion_probability_bruteforce(int n);

// |1 - sum_{n <= n_max} lambda K(n) e^{-2nF}|: the pinned renewal is proper for
// lambda > 2. DomainError otherwise.
double renewal_mass_defect(double lambda, int n_max);

// |log(sum over compositions of prod Ktilde) - log(lambda e^{-2NF} Z_N)|.
double renewal_identity_check(const ModelParams& params);

struct TiltedWalk {
  double log_event_probability = 0.0;  // log nu_N(S_2N = 0, S_n > 0 inside)
  double log_normalizer = 0.0;         // sum_k log cosh(h_k)
};

TiltedWalk tilted_walk_positivity(int N, double sigma, int max_N = 2000);

// Brute-force log weight of {predicate}; N <= 10.
double event_weight_oracle(const ModelParams& params, const std::function<bool(const PathConfig&)>& predicate);
inline constexpr int kOracleMaxN = 10;

// Exact sampler for E1 = {l_max <= m} and E2 = {l_max > m}: a composition is
// drawn from the corresponding DP, then each excursion from its own tilted law.
class CompositionSampler {
 public:
  explicit CompositionSampler(const ModelParams& params);

  PathConfig sample_restricted(int m, Philox& rng);
  PathConfig sample_exceeding(int m, Philox& rng);

 private:
  void append_excursion(int n, Philox& rng, std::vector<int>& heights);
  const std::vector<double>& restricted(int m);
  const std::vector<double>& exceeding(int m);
  PathConfig assemble(const std::vector<int>& parts, Philox& rng);

  CompositionModel model_;
  std::map<int, std::vector<double>> restricted_cache_;
  std::map<int, std::vector<double>> exceeding_cache_;
  std::map<int, std::unique_ptr<ForwardTable>> bridge_tables_;
};

}  // namespace pinflip
