#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pinflip/dynamics.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/path.hpp"
#include "pinflip/stats.hpp"

namespace pinflip {

enum class Well { kE1, kE2 };
const char* to_string(Well w);

// Metastable well for a regime: E1 when delocalized, E2 otherwise (ties included).
inline Well metastable_well(StaticRegime regime) {
  return regime == StaticRegime::kDelocalized ? Well::kE1 : Well::kE2;
}

// Exact draws from mu_N(. | well). E1 comes straight from the restricted
// composition DP; E2 is drawn by rejection from the unconditioned sampler,
// switching to the direct E2 composition sampler after `rejection_cap` misses.
class ConditionedSampler {
 public:
  ConditionedSampler(const ModelParams& params, double beta_star, Well well, int rejection_cap = 1000,
                     bool allow_fallback = true);

  PathConfig sample(Philox& rng);

  int threshold() const { return threshold_; }
  std::uint64_t rejections() const { return rejections_; }
  std::uint64_t fallbacks() const { return fallbacks_; }

 private:
  ModelParams params_;
  Well well_;
  int threshold_;
  int rejection_cap_;
  bool allow_fallback_;
  CompositionSampler composition_;
  std::optional<ForwardTable> table_;
  std::uint64_t rejections_ = 0;
  std::uint64_t fallbacks_ = 0;
};

PathConfig sample_conditioned(const ModelParams& params, double beta_star, Well well, Philox& rng);

struct ExitOptions {
  double max_time = 1e7;                 // per-replica horizon; longer exits are censored
  std::optional<double> reference_gap;   // supplied gap; otherwise computed when N <= 12
  bool compute_gap = true;
  int jobs = 1;
};

struct ExitExperiment {
  ModelParams params;
  double beta_star = 0.0;
  StaticRegime regime = StaticRegime::kCritical;
  Well well = Well::kE2;
  int threshold = 0;
  int replicas = 0;
  std::uint64_t seed = 0;
  std::vector<double> exit_times;
  std::vector<bool> censored;
  ExponentialFit fit;
  double ks_unit = 0.0;                // times / sample mean vs Exp(1), uncensored only
  std::optional<double> gap;
  double predicted_scale = 0.0;        // 1 / gap when known, else exp(2 N E)
  bool predicted_from_gap = false;
};

// exp(2 N E(lambda, sigma)); the crude time scale of an exit.
double predicted_exit_scale(const ModelParams& params);

// Per replica r (stream r of seed): draw from mu_N(. | H_N), run the dynamics
// until the well indicator first changes. DomainError when E = 0 or a well is
// empty.
ExitExperiment exit_time_experiment(const ModelParams& params, int replicas, std::uint64_t seed,
                                    const ExitOptions& options = {});

}  // namespace pinflip
