#include <algorithm>
#include <cmath>

#include "pinflip/errors.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/logmath.hpp"

namespace pinflip {

namespace {

using Vec = std::vector<double>;

double at(const Vec& v, int i) { return v[static_cast<std::size_t>(i)]; }
double& at(Vec& v, int i) { return v[static_cast<std::size_t>(i)]; }

// Index drawn with probability proportional to exp(logw[i]).
std::size_t pick_log(const Vec& logw, Philox& rng) {
  double m = kNegInf;
  for (double w : logw) m = std::max(m, w);
  if (m == kNegInf) throw SamplingError("no admissible choice with positive weight");
  double total = 0.0;
  for (double w : logw) total += std::exp(w - m);
  double u = uniform01(rng) * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    if (logw[i] == kNegInf) continue;
    last = i;
    u -= std::exp(logw[i] - m);
    if (u < 0.0) return i;
  }
  return last;
}

}  // namespace

CompositionModel::CompositionModel(const ModelParams& params)
    : params_(params), log_lambda_(std::log(params.lambda)) {
  params_.validate();
  ex_ = excursion_log_weights(params_.N, params_.site_tilt());
}

int CompositionModel::threshold(double beta) const {
  const int N = params_.N;
  double raw = std::floor(beta * N);
  int m = raw < 0.0 ? 0 : (raw > N ? N : static_cast<int>(raw));
  while (m < N && in_first_well(m + 1, N, beta)) ++m;
  while (m > 0 && !in_first_well(m, N, beta)) --m;
  return m;
}

Vec CompositionModel::pinned_weights(int m) const {
  const int N = params_.N;
  m = std::clamp(m, 0, N);
  Vec D(static_cast<std::size_t>(N) + 1, kNegInf);
  D[0] = 0.0;
  for (int j = 1; j <= N; ++j) {
    double acc = j <= m ? at(ex_, j) : kNegInf;
    for (int n = 1; n <= std::min(m, j - 1); ++n) {
      acc = log_add(acc, at(ex_, n) + log_lambda_ + at(D, j - n));
    }
    at(D, j) = acc;
  }
  return D;
}

Vec CompositionModel::exceeding_weights(int m) const {
  const int N = params_.N;
  m = std::clamp(m, 0, N);
  const Vec any = pinned_weights(N);
  Vec S(static_cast<std::size_t>(N) + 1, kNegInf);
  for (int j = 1; j <= N; ++j) {
    double acc = kNegInf;
    // First part small: the long excursion is still to come.
    for (int n = 1; n <= std::min(m, j - 1); ++n) acc = log_add(acc, at(ex_, n) + log_lambda_ + at(S, j - n));
    // First part long: the rest is unconstrained.
    for (int n = m + 1; n <= j; ++n) {
      const double rest = n == j ? 0.0 : log_lambda_ + at(any, j - n);
      acc = log_add(acc, at(ex_, n) + rest);
    }
    at(S, j) = acc;
  }
  return S;
}

double CompositionModel::logZ() const { return pinned_weights(params_.N).back(); }

double CompositionModel::log_restricted(int m) const {
  if (m <= 0) return kNegInf;
  return pinned_weights(m).back();
}

double CompositionModel::log_exceeding(int m) const {
  if (m >= params_.N) return kNegInf;
  return exceeding_weights(m).back();
}

double CompositionModel::log_exact_max(int m) const {
  const int N = params_.N;
  if (m < 1 || m > N) return kNegInf;
  const Vec D = pinned_weights(m);
  Vec T(static_cast<std::size_t>(N) + 1, kNegInf);
  for (int j = 1; j <= N; ++j) {
    double acc = kNegInf;
    for (int n = 1; n <= std::min(m - 1, j - 1); ++n) acc = log_add(acc, at(ex_, n) + log_lambda_ + at(T, j - n));
    if (j == m) acc = log_add(acc, at(ex_, m));
    if (j > m) acc = log_add(acc, at(ex_, m) + log_lambda_ + at(D, j - m));
    at(T, j) = acc;
  }
  return T.back();
}

double CompositionModel::log_boundary(int m) const {
  const int N = params_.N;
  if (m <= 0 || m >= N) return kNegInf;
  // Automaton over compositions with all parts <= m. State (j, last part n,
  // flag); the flag records whether some adjacent pair already sums above m.
  const auto W = static_cast<std::size_t>(m) + 2;
  std::vector<Vec> clean(static_cast<std::size_t>(N) + 1, Vec(W, kNegInf));
  std::vector<Vec> flagged(static_cast<std::size_t>(N) + 1, Vec(W, kNegInf));
  // prefix[j][k] = logsum_{n <= k} clean[j][n]; suffix[j][k] = logsum_{n >= k} clean[j][n]
  std::vector<Vec> prefix(static_cast<std::size_t>(N) + 1, Vec(W, kNegInf));
  std::vector<Vec> suffix(static_cast<std::size_t>(N) + 1, Vec(W, kNegInf));
  Vec flagged_total(static_cast<std::size_t>(N) + 1, kNegInf);

  auto finish_row = [&](int j) {
    auto& c = clean[static_cast<std::size_t>(j)];
    auto& p = prefix[static_cast<std::size_t>(j)];
    auto& s = suffix[static_cast<std::size_t>(j)];
    for (int k = 1; k <= m; ++k) at(p, k) = log_add(at(p, k - 1), at(c, k));
    for (int k = m; k >= 1; --k) at(s, k) = log_add(at(s, k + 1), at(c, k));
    double f = kNegInf;
    for (int k = 1; k <= m; ++k) f = log_add(f, at(flagged[static_cast<std::size_t>(j)], k));
    at(flagged_total, j) = f;
  };

  for (int j = 1; j <= N; ++j) {
    auto& c = clean[static_cast<std::size_t>(j)];
    auto& f = flagged[static_cast<std::size_t>(j)];
    for (int n = 1; n <= std::min(m, j); ++n) {
      const double add = at(ex_, n);
      if (j == n) {
        at(c, n) = add;
        continue;
      }
      const int i = j - n;
      const double step = add + log_lambda_;
      // Previous last part k joins with n above the threshold iff k > m - n.
      const int cut = m - n;  // k <= cut stays clean
      const double stay_clean = cut >= 1 ? at(prefix[static_cast<std::size_t>(i)], std::min(cut, m)) : kNegInf;
      const double become_flagged = cut + 1 <= m ? at(suffix[static_cast<std::size_t>(i)], std::max(cut + 1, 1)) : kNegInf;
      at(c, n) = stay_clean == kNegInf ? kNegInf : step + stay_clean;
      const double fl = log_add(at(flagged_total, i), become_flagged);
      at(f, n) = fl == kNegInf ? kNegInf : step + fl;
    }
    finish_row(j);
  }
  return at(flagged_total, N);
}

double restricted_partition(const ModelParams& params, int max_half_excursion) {
  if (max_half_excursion < 1 || max_half_excursion > params.N) {
    throw ArgumentError("max half-excursion must lie in 1..N");
  }
  return CompositionModel(params).log_restricted(max_half_excursion);
}

std::vector<double> lmax_distribution(const ModelParams& params, const ExactCaps& caps) {
  params.validate();
  if (params.N > caps.lmax_law_max_N) {
    throw CapacityError("l_max law capped at N = " + std::to_string(caps.lmax_law_max_N));
  }
  const CompositionModel model(params);
  const double logZ = model.logZ();
  std::vector<double> p(static_cast<std::size_t>(params.N) + 1, 0.0);
  for (int l = 1; l <= params.N; ++l) {
    const double w = model.log_exact_max(l);
    p[static_cast<std::size_t>(l)] = w == kNegInf ? 0.0 : std::exp(w - logZ);
  }
  return p;
}

EventWeights event_weights(const ModelParams& params, double beta_star) {
  if (!(beta_star > 0.0 && beta_star < 1.0)) throw ArgumentError("beta_star must lie in (0,1)");
  const CompositionModel model(params);
  EventWeights w;
  w.threshold = model.threshold(beta_star);
  w.logZ = model.logZ();
  w.logZ_E1 = model.log_restricted(w.threshold);
  w.logZ_E2 = model.log_exceeding(w.threshold);
  w.logZ_boundary = model.log_boundary(w.threshold);
  w.degenerate = w.threshold == 0 || w.threshold >= params.N;
  return w;
}

double boundary_weight(const ModelParams& params, double beta_star) {
  return event_weights(params, beta_star).logZ_boundary;
}

CompositionSampler::CompositionSampler(const ModelParams& params) : model_(params) {}

const Vec& CompositionSampler::restricted(int m) {
  auto it = restricted_cache_.find(m);
  if (it == restricted_cache_.end()) it = restricted_cache_.emplace(m, model_.pinned_weights(m)).first;
  return it->second;
}

const Vec& CompositionSampler::exceeding(int m) {
  auto it = exceeding_cache_.find(m);
  if (it == exceeding_cache_.end()) it = exceeding_cache_.emplace(m, model_.exceeding_weights(m)).first;
  return it->second;
}

void CompositionSampler::append_excursion(int n, Philox& rng, std::vector<int>& heights) {
  heights.push_back(1);
  if (n > 1) {
    auto it = bridge_tables_.find(n);
    if (it == bridge_tables_.end()) {
      // Lifted interior: a free bridge of half-length n - 1 at the same per-site tilt.
      const ModelParams inner{n - 1, 1.0, model_.params().site_tilt() * (n - 1)};
      it = bridge_tables_.emplace(n, std::make_unique<ForwardTable>(inner)).first;
    }
    const PathConfig bridge = it->second->sample(rng);
    for (int x = 1; x < bridge.length(); ++x) heights.push_back(bridge[x] + 1);
    heights.push_back(1);
  }
  heights.push_back(0);
}

PathConfig CompositionSampler::assemble(const std::vector<int>& parts, Philox& rng) {
  std::vector<int> h{0};
  h.reserve(2 * static_cast<std::size_t>(model_.N()) + 1);
  for (int n : parts) append_excursion(n, rng, h);
  return PathConfig(std::move(h));
}

PathConfig CompositionSampler::sample_restricted(int m, Philox& rng) {
  const int N = model_.N();
  if (m < 1) throw SamplingError("E1 is empty for threshold 0");
  m = std::min(m, N);
  const Vec& D = restricted(m);
  std::vector<int> parts;
  int j = N;
  Vec w;
  while (j > 0) {
    w.assign(static_cast<std::size_t>(std::min(m, j)), kNegInf);
    for (int n = 1; n <= std::min(m, j); ++n) {
      const double rest = n == j ? 0.0 : model_.log_lambda() + at(D, j - n);
      at(w, n - 1) = model_.log_excursion(n) + rest;
    }
    const int n = static_cast<int>(pick_log(w, rng)) + 1;
    parts.push_back(n);
    j -= n;
  }
  return assemble(parts, rng);
}

PathConfig CompositionSampler::sample_exceeding(int m, Philox& rng) {
  const int N = model_.N();
  if (m >= N) throw SamplingError("E2 is empty for threshold >= N");
  m = std::max(m, 0);
  const Vec& S = exceeding(m);
  const Vec& any = restricted(N);
  std::vector<int> parts;
  int j = N;
  bool pending = true;  // the long excursion has not been placed yet
  Vec w;
  while (j > 0) {
    w.assign(static_cast<std::size_t>(j), kNegInf);
    for (int n = 1; n <= j; ++n) {
      double rest = kNegInf;
      if (pending && n <= m) {
        rest = n == j ? kNegInf : model_.log_lambda() + at(S, j - n);
      } else {
        rest = n == j ? 0.0 : model_.log_lambda() + at(any, j - n);
      }
      at(w, n - 1) = model_.log_excursion(n) + rest;
    }
    const int n = static_cast<int>(pick_log(w, rng)) + 1;
    if (n > m) pending = false;
    parts.push_back(n);
    j -= n;
  }
  return assemble(parts, rng);
}

}  // namespace pinflip
