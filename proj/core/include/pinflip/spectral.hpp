#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pinflip/path.hpp"

namespace pinflip {

struct Transition {
  std::size_t from = 0;
  std::size_t to = 0;
  double rate = 0.0;
};

struct GeneratorOptions {
  // Keep only states satisfying the predicate; transitions leaving the set are
  // dropped (the conditioned chain).
  std::function<bool(const PathConfig&)> subset;
  // Drop transitions that move the last zero left of N or the first zero right
  // of N by more than two lattice steps.
  bool starred = false;
  std::size_t max_states = 300000;
};

// Reversible continuous-time generator stored row-wise (CSR, off-diagonal
// entries only) together with its normalised stationary law.
class SparseGenerator {
 public:
  static SparseGenerator build(const ModelParams& params, const GeneratorOptions& options = {});
  // Generic reversible chain from unnormalised log weights and a transition list.
  static SparseGenerator from_transitions(std::vector<double> log_weights, const std::vector<Transition>& transitions);

  std::size_t size() const { return log_mu_.size(); }
  bool has_paths() const { return !codes_.empty(); }
  const ModelParams& params() const { return params_; }

  std::uint64_t code(std::size_t i) const { return codes_[i]; }
  PathConfig state(std::size_t i) const { return PathConfig::from_code(codes_[i], params_.N); }
  std::optional<std::size_t> find(std::uint64_t code) const;

  std::span<const double> log_mu() const { return log_mu_; }
  std::vector<double> mu() const;
  double exit_rate(std::size_t i) const { return exit_[i]; }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> cols() const { return cols_; }
  std::span<const double> rates() const { return rates_; }

  // Largest relative violation of mu(i) r(i,j) = mu(j) r(j,i) over stored pairs.
  double reversibility_defect() const;
  bool irreducible() const;

  // sqrt(mu)-similarity transform of -L: symmetric, nonnegative definite.
  Eigen::MatrixXd dense_symmetric() const;
  void apply_symmetric(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;

  // Subchain on the given states (ascending indices), conditioned as in build().
  SparseGenerator restrict_to(const std::vector<std::size_t>& states) const;

 private:
  void finalize(const std::vector<Transition>& transitions);

  ModelParams params_;
  std::vector<std::uint64_t> codes_;
  std::vector<double> log_mu_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> rates_;
  std::vector<double> sym_;  // sqrt(mu_i / mu_j) r(i,j)
  std::vector<double> exit_;
};

struct GapOptions {
  std::size_t dense_max = 500;
  double tolerance = 1e-10;  // residual norm for the iterative solver
  int krylov_dim = 64;
  int keep = 16;
  int max_restarts = 5000;
  bool want_vector = false;
};

struct GapResult {
  double gap = 0.0;
  double residual = 0.0;
  std::string method;
  int iterations = 0;
  // Eigenfunction in the original coordinates (f = v / sqrt(mu)) when requested.
  std::vector<double> eigenfunction;
};

// Smallest positive eigenvalue of -L; +inf for a single state. Throws
// ConvergenceError when the iterative solver stalls and StructuralError when the
// chain is reducible.
GapResult spectral_gap(const SparseGenerator& gen, const GapOptions& options = {});

struct LanczosResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  int iterations = 0;
};

// Smallest eigenpair of a symmetric operator restricted to the orthogonal
// complement of `deflate` (thick-restart Lanczos with full reorthogonalisation).
LanczosResult lanczos_smallest(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& op,
                               std::size_t n, const Eigen::VectorXd& deflate, const GapOptions& options);

struct Rayleigh {
  double dirichlet = 0.0;
  double variance = 0.0;
  double quotient = 0.0;
};

// Pairwise Dirichlet form, variance under mu and their ratio; DegenerateInputError
// for an (almost surely) constant function.
Rayleigh dirichlet_rayleigh(const SparseGenerator& gen, std::span<const double> f);

// exp(a A / N) evaluated on every state.
std::vector<double> area_test_function(const SparseGenerator& gen, double a);

struct AreaTestMoments {
  double log_mean = 0.0;    // log mu(f_a) = log Z(sigma + a) - log Z(sigma)
  double variance = 0.0;    // mu(f_a^2) - mu(f_a)^2 from partition functions
};
AreaTestMoments area_test_moments(const ModelParams& params, double a);

struct BottleneckBound {
  double t_rel_lower = 0.0;  // mu(E1) mu(E2) / (2N mu(boundary))
  double log_t_rel_lower = 0.0;
  bool degenerate = false;   // E1 or E2 empty
  int threshold = 0;
};

BottleneckBound bottleneck_bound(const ModelParams& params, double beta_star);

// Chain on partition pieces: pi_bar(i) = mu(S_i), rates(i, j) = sum over
// S_i x S_j of mu(. | S_i) r, and gamma_bar bounding every state's exit rate
// out of its piece.
struct ReducedChain {
  std::vector<std::pair<int, int>> keys;  // (x, y) for LR pieces, (i, 0) otherwise
  std::vector<double> pi_bar;
  Eigen::MatrixXd rates;
  double gamma_bar = 0.0;
  bool gamma_exact = false;  // gamma_bar is the attained maximum, not a bound

  SparseGenerator as_generator() const;
  double max_exit_rate() const;
  std::optional<std::size_t> find(std::pair<int, int> key) const;
};

// Reduction of an explicit generator by a label per state (labels 0..k-1). Keys
// default to (label, 0).
ReducedChain reduce_by_labels(const SparseGenerator& gen, const std::vector<int>& labels,
                              std::vector<std::pair<int, int>> keys = {});

// Piece labels (L/2, R/2) for every state of a path generator.
std::vector<std::pair<int, int>> lr_keys(const SparseGenerator& gen);
std::vector<int> lr_labels(const SparseGenerator& gen, std::vector<std::pair<int, int>>* keys = nullptr);
std::vector<int> two_set_labels(const SparseGenerator& gen, double beta_star);

// LR reduction from the renewal DP, N <= 60. With starred = true only the
// nearest-neighbour (x, y) moves are kept.
ReducedChain reduced_lr_chain(const ModelParams& params, bool starred = false);
inline constexpr int kReducedLrMaxN = 60;

struct JerrumReport {
  double gap = 0.0;
  double reduced_gap = 0.0;
  double min_restricted_gap = 0.0;
  double gamma_bar = 0.0;
  double rhs = 0.0;
  bool holds = false;
  std::size_t pieces = 0;
  std::size_t disconnected_pieces = 0;
};

JerrumReport jerrum_check(const SparseGenerator& gen, const std::vector<int>& labels, const GapOptions& options = {});

double star_chain_gap(const ModelParams& params, const GapOptions& options = {});

// Gap of the restricted chain on {L = 2x, R = 2y} assembled from its three
// independent factors; +inf when every factor is a single state.
double lr_piece_product_gap(const ModelParams& params, int x, int y);

inline double wilson_bound(int n) {
  const double s = std::sin(3.14159265358979323846 / (4.0 * n));
  return 2.0 * s * s;
}

struct CheegerResult {
  double chi = 0.0;
  double bound = 0.0;      // chi^2 / (2 max(1, max exit rate))
  bool rigorous = false;   // true when every cut was examined
  std::size_t cuts = 0;
};

// Exhaustive over all cuts for <= 20 pieces; otherwise the up-set (staircase)
// family of LR keys, which only yields an estimate. CapacityError when the
// staircase family exceeds max_cuts.
CheegerResult cheeger_bound(const ReducedChain& chain, std::size_t max_cuts = 2000000);

// Comparison weight for LR pieces built from the free energies, up to a constant.
double surrogate_log_weight(const ModelParams& params, int x, int y);

struct MixingResult {
  double t_mix = 0.0;
  double t_rel = 0.0;
  double mu_min = 0.0;
  double lower = 0.0;  // T_rel log(1 / 2 eps)
  double upper = 0.0;  // T_rel log(1 / (eps mu_min))
};

// Worst-start total-variation mixing time by spectral exponentiation; N <= 6.
MixingResult tv_mixing_exact(const ModelParams& params, double epsilon);
double tv_distance_at(const ModelParams& params, double t);
inline constexpr int kMixingMaxN = 6;

// Law at time t from a fixed start, by the same spectral route.
std::vector<double> transition_row(const SparseGenerator& gen, std::size_t start, double t);

}  // namespace pinflip
