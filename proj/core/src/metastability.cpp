#include "pinflip/metastability.hpp"

#include <cmath>
#include <string>

#include "pinflip/errors.hpp"
#include "pinflip/parallel.hpp"
#include "pinflip/phase.hpp"
#include "pinflip/spectral.hpp"

namespace pinflip {

const char* to_string(Well w) { return w == Well::kE1 ? "E1" : "E2"; }

ConditionedSampler::ConditionedSampler(const ModelParams& params, double beta_star, Well well, int rejection_cap,
                                       bool allow_fallback)
    : params_(params),
      well_(well),
      threshold_(0),
      rejection_cap_(rejection_cap),
      allow_fallback_(allow_fallback),
      composition_(params) {
  if (!(beta_star > 0.0 && beta_star < 1.0)) throw ArgumentError("beta_star must lie in (0, 1)");
  if (rejection_cap < 1) throw ArgumentError("rejection cap must be >= 1");
  threshold_ = CompositionModel(params).threshold(beta_star);
  if (well == Well::kE1 && threshold_ < 1) throw SamplingError("E1 is empty");
  if (well == Well::kE2) {
    if (threshold_ >= params.N) throw SamplingError("E2 is empty");
    table_.emplace(params);
  }
}

PathConfig ConditionedSampler::sample(Philox& rng) {
  if (well_ == Well::kE1) return composition_.sample_restricted(threshold_, rng);
  for (int i = 0; i < rejection_cap_; ++i) {
    PathConfig p = exact_sample(*table_, rng);
    if (landmarks(p).l_max > threshold_) return p;
    ++rejections_;
  }
  if (!allow_fallback_) {
    throw SamplingError("rejection cap of " + std::to_string(rejection_cap_) + " exceeded for E2");
  }
  ++fallbacks_;
  return composition_.sample_exceeding(threshold_, rng);
}

PathConfig sample_conditioned(const ModelParams& params, double beta_star, Well well, Philox& rng) {
  ConditionedSampler sampler(params, beta_star, well);
  return sampler.sample(rng);
}

double predicted_exit_scale(const ModelParams& params) {
  params.validate();
  return std::exp(2.0 * params.N * activation_energy(params.lambda, params.sigma).E);
}

ExitExperiment exit_time_experiment(const ModelParams& params, int replicas, std::uint64_t seed,
                                    const ExitOptions& options) {
  params.validate();
  if (replicas < 1) throw ArgumentError("replicas must be >= 1");
  if (!(options.max_time > 0.0)) throw ArgumentError("max_time must be > 0");
  const PhasePoint phase = phase_point(params.lambda, params.sigma);
  if (!(phase.E > 0.0) || !phase.beta_star) {
    throw DomainError("no metastable well: activation energy is 0 at this (lambda, sigma)");
  }
  const EventWeights weights = event_weights(params, *phase.beta_star);
  if (weights.degenerate) throw DomainError("degenerate wells: E1 or E2 is empty at N = " + std::to_string(params.N));

  ExitExperiment ex;
  ex.params = params;
  ex.beta_star = *phase.beta_star;
  ex.regime = phase.static_regime;
  ex.well = metastable_well(ex.regime);
  ex.threshold = weights.threshold;
  ex.replicas = replicas;
  ex.seed = seed;
  ex.exit_times.assign(static_cast<std::size_t>(replicas), 0.0);
  std::vector<char> cens(static_cast<std::size_t>(replicas), 0);

  const int N = params.N;
  const int m = ex.threshold;
  const Well well = ex.well;
  auto in_well = [&](int l_max) { return (l_max <= m) == (well == Well::kE1); };

  auto worker = [&](int first, int stride) {
    ConditionedSampler sampler(params, ex.beta_star, well);
    for (int r = first; r < replicas; r += stride) {
      Philox rng(seed, static_cast<std::uint64_t>(r));
      Simulator sim(params, sampler.sample(rng));
      const auto i = static_cast<std::size_t>(r);
      while (true) {
        const auto changed = sim.step(rng);
        if (sim.time() > options.max_time) {
          ex.exit_times[i] = options.max_time;
          cens[i] = 1;
          break;
        }
        if (changed && !in_well(sim.l_max())) {
          ex.exit_times[i] = sim.time();
          break;
        }
      }
    }
  };
  run_strided(replicas, options.jobs, worker);
  ex.censored.assign(cens.begin(), cens.end());

  ex.fit = exponential_fit(ex.exit_times, ex.censored);
  std::vector<double> complete;
  double sum = 0.0;
  for (std::size_t i = 0; i < ex.exit_times.size(); ++i) {
    if (ex.censored[i]) continue;
    complete.push_back(ex.exit_times[i]);
    sum += ex.exit_times[i];
  }
  ex.ks_unit = ks_exponential(complete, static_cast<double>(complete.size()) / sum);

  if (options.reference_gap) {
    ex.gap = options.reference_gap;
  } else if (options.compute_gap && N <= kMaxEnumerationN) {
    ex.gap = spectral_gap(SparseGenerator::build(params)).gap;
  }
  if (ex.gap && *ex.gap > 0.0 && std::isfinite(*ex.gap)) {
    ex.predicted_scale = 1.0 / *ex.gap;
    ex.predicted_from_gap = true;
  } else {
    ex.predicted_scale = std::exp(2.0 * N * phase.E);
  }
  return ex;
}

}  // namespace pinflip
