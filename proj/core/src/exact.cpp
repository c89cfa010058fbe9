#include "pinflip/exact.hpp"

#include <algorithm>
#include <cmath>

#include "pinflip/errors.hpp"
#include "pinflip/logmath.hpp"
#include "pinflip/phase.hpp"

namespace pinflip {

namespace {

int row_max(int N, int x) { return std::min(x, 2 * N - x); }

// Picks index 0 or 1 with probability proportional to exp(a), exp(b).
int pick_two(double a, double b, Philox& rng) {
  if (a == kNegInf) return 1;
  if (b == kNegInf) return 0;
  const double p0 = 1.0 / (1.0 + std::exp(b - a));
  return uniform01(rng) < p0 ? 0 : 1;
}

}  // namespace

double log_site_factor(const ModelParams& params, int x, int h) {
  double v = -std::log(2.0) + params.site_tilt() * h;
  if (h == 0 && x > 0 && x < 2 * params.N) v += std::log(params.lambda);
  return v;
}

ForwardTable::ForwardTable(const ModelParams& params, bool with_backward, const ExactCaps& caps)
    : params_(params) {
  params_.validate();
  const int N = params_.N;
  if (N > caps.full_table_max_N) {
    throw CapacityError("full transfer table capped at N = " + std::to_string(caps.full_table_max_N));
  }
  offset_.resize(2 * static_cast<std::size_t>(N) + 2);
  offset_[0] = 0;
  for (int x = 0; x <= 2 * N; ++x) {
    offset_[static_cast<std::size_t>(x) + 1] =
        offset_[static_cast<std::size_t>(x)] + static_cast<std::size_t>((row_max(N, x) - x % 2) / 2 + 1);
  }
  fwd_.assign(offset_.back(), kNegInf);
  fwd_[0] = 0.0;
  for (int x = 1; x <= 2 * N; ++x) {
    for (int h = x % 2; h <= row_max(N, x); h += 2) {
      double acc = kNegInf;
      if (in_range(x - 1, h - 1)) acc = log_add(acc, fwd_[index(x - 1, h - 1)]);
      if (in_range(x - 1, h + 1)) acc = log_add(acc, fwd_[index(x - 1, h + 1)]);
      fwd_[index(x, h)] = acc == kNegInf ? kNegInf : acc + log_site_factor(params_, x, h);
    }
  }
  if (!with_backward) return;
  bwd_.assign(offset_.back(), kNegInf);
  bwd_[index(2 * N, 0)] = 0.0;
  for (int x = 2 * N - 1; x >= 0; --x) {
    for (int h = x % 2; h <= row_max(N, x); h += 2) {
      double acc = kNegInf;
      for (int hn : {h - 1, h + 1}) {
        if (!in_range(x + 1, hn)) continue;
        const double b = bwd_[index(x + 1, hn)];
        if (b != kNegInf) acc = log_add(acc, b + log_site_factor(params_, x + 1, hn));
      }
      bwd_[index(x, h)] = acc;
    }
  }
}

bool ForwardTable::in_range(int x, int h) const {
  return x >= 0 && x <= 2 * params_.N && h >= 0 && h <= row_max(params_.N, x) && (h - x) % 2 == 0;
}

std::size_t ForwardTable::index(int x, int h) const {
  return offset_[static_cast<std::size_t>(x)] + static_cast<std::size_t>(h / 2);
}

double ForwardTable::log_forward(int x, int h) const { return in_range(x, h) ? fwd_[index(x, h)] : kNegInf; }

double ForwardTable::log_backward(int x, int h) const {
  if (bwd_.empty()) throw ArgumentError("table was built without the backward pass");
  return in_range(x, h) ? bwd_[index(x, h)] : kNegInf;
}

std::vector<double> ForwardTable::site_marginal(int x) const {
  if (x < 0 || x > 2 * params_.N) throw ArgumentError("site index outside 0..2N");
  const double logZ = total_logZ();
  std::vector<double> p(static_cast<std::size_t>(row_max(params_.N, x)) + 1, 0.0);
  for (int h = x % 2; h <= row_max(params_.N, x); h += 2) {
    const double lw = log_forward(x, h) + log_backward(x, h);
    p[static_cast<std::size_t>(h)] = lw == kNegInf ? 0.0 : std::exp(lw - logZ);
  }
  return p;
}

PathConfig ForwardTable::sample(Philox& rng) const {
  const int len = 2 * params_.N;
  if (total_logZ() == kNegInf) throw SamplingError("model has zero total weight");
  std::vector<int> h(static_cast<std::size_t>(len) + 1, 0);
  for (int x = len - 1; x >= 0; --x) {
    const int next = h[static_cast<std::size_t>(x) + 1];
    const double down = log_forward(x, next - 1);
    const double up = log_forward(x, next + 1);
    h[static_cast<std::size_t>(x)] = pick_two(down, up, rng) == 0 ? next - 1 : next + 1;
  }
  return PathConfig(std::move(h));
}

double partition_function(const ModelParams& params, const ExactCaps& caps) {
  params.validate();
  const int N = params.N;
  if (N > caps.rolling_max_N) throw CapacityError("partition function capped at N = " + std::to_string(caps.rolling_max_N));
  std::vector<double> cur(static_cast<std::size_t>(N) + 2, kNegInf);
  std::vector<double> nxt(cur.size(), kNegInf);
  cur[0] = 0.0;
  for (int x = 1; x <= 2 * N; ++x) {
    std::fill(nxt.begin(), nxt.end(), kNegInf);
    for (int h = x % 2; h <= row_max(N, x); h += 2) {
      double acc = kNegInf;
      if (h >= 1) acc = log_add(acc, cur[static_cast<std::size_t>(h) - 1]);
      acc = log_add(acc, cur[static_cast<std::size_t>(h) + 1]);
      if (acc != kNegInf) nxt[static_cast<std::size_t>(h)] = acc + log_site_factor(params, x, h);
    }
    std::swap(cur, nxt);
  }
  return cur[0];
}

double excursion_Z(int n, double sigma_eff) {
  if (n < 1) throw ArgumentError("excursion half-length must be >= 1");
  return partition_function(ModelParams{n, 0.0, sigma_eff});
}

std::vector<double> excursion_log_weights(int n_max, double site_tilt) {
  if (n_max < 1) throw ArgumentError("n_max must be >= 1");
  // An excursion of half-length n is an up-step, a nonnegative bridge of length
  // 2(n-1) lifted by one, and a down-step. The bridge weights for every length
  // come out of one free DP with unit pinning.
  const int len = 2 * (n_max - 1);
  std::vector<double> ex(static_cast<std::size_t>(n_max) + 1, kNegInf);
  std::vector<double> cur(static_cast<std::size_t>(n_max) + 2, kNegInf);
  std::vector<double> nxt(cur.size(), kNegInf);
  cur[0] = 0.0;
  const double log2 = std::log(2.0);
  auto record = [&](int x) {
    const int n = x / 2 + 1;
    ex[static_cast<std::size_t>(n)] = -2.0 * log2 + site_tilt * (2.0 * n - 1.0) + cur[0];
  };
  record(0);
  for (int x = 1; x <= len; ++x) {
    std::fill(nxt.begin(), nxt.end(), kNegInf);
    for (int h = x % 2; h <= std::min(x, len - x); h += 2) {
      double acc = kNegInf;
      if (h >= 1) acc = log_add(acc, cur[static_cast<std::size_t>(h) - 1]);
      acc = log_add(acc, cur[static_cast<std::size_t>(h) + 1]);
      if (acc != kNegInf) nxt[static_cast<std::size_t>(h)] = acc - log2 + site_tilt * h;
    }
    std::swap(cur, nxt);
    if (x % 2 == 0) record(x);
  }
  return ex;
}

std::vector<double> site_marginal(const ModelParams& params, int x) {
  return ForwardTable(params, true).site_marginal(x);
}

PathConfig exact_sample(const ForwardTable& table, Philox& rng) { return table.sample(rng); }

RenewalKernels renewal_kernels(const ModelParams& params, int n_max) {
  params.validate();
  if (n_max < 1) throw ArgumentError("n_max must be >= 1");
  RenewalKernels out;
  out.K.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  out.log_Ktilde.assign(static_cast<std::size_t>(n_max) + 1, kNegInf);
  // K(1) = 1/4 and K(n+1)/K(n) = (2n - 1) / (2(n + 1)).
  out.K[1] = 0.25;
  for (int n = 1; n < n_max; ++n) {
    out.K[static_cast<std::size_t>(n) + 1] = out.K[static_cast<std::size_t>(n)] * (2.0 * n - 1.0) / (2.0 * (n + 1.0));
  }
  const double F = free_energy_pinning(params.lambda);
  const double log_lambda = std::log(params.lambda);
  const std::vector<double> ex = excursion_log_weights(n_max, params.site_tilt());
  for (int n = 1; n <= n_max; ++n) {
    out.log_Ktilde[static_cast<std::size_t>(n)] = log_lambda - 2.0 * n * F + ex[static_cast<std::size_t>(n)];
  }
  return out;
}

double excursion_probability_bruteforce(int n) {
  if (n < 1 || n > 12) throw ArgumentError("brute-force excursion law needs 1 <= n <= 12");
  const int len = 2 * n;
  std::uint64_t hits = 0;
  for (std::uint64_t steps = 0; steps < (std::uint64_t{1} << len); ++steps) {
    int s = 0;
    bool ok = true;
    for (int k = 0; k < len && ok; ++k) {
      s += ((steps >> k) & 1u) ? 1 : -1;
      if (k < len - 1 && s <= 0) ok = false;
    }
    if (ok && s == 0) ++hits;
  }
  return std::ldexp(static_cast<double>(hits), -len);
}

double renewal_mass_defect(double lambda, int n_max) {
  if (!(lambda > 2.0) || !std::isfinite(lambda)) throw DomainError("renewal mass needs lambda > 2");
  const RenewalKernels k = renewal_kernels({1, lambda, 0.0}, n_max);
  const double F = free_energy_pinning(lambda);
  double sum = 0.0;
  for (int n = n_max; n >= 1; --n) sum += lambda * k.K[static_cast<std::size_t>(n)] * std::exp(-2.0 * n * F);
  return std::fabs(1.0 - sum);
}

double renewal_identity_check(const ModelParams& params) {
  params.validate();
  if (!(params.lambda > 2.0)) throw DomainError("renewal identity needs lambda > 2");
  const int N = params.N;
  const double F = free_energy_pinning(params.lambda);
  const double log_lambda = std::log(params.lambda);
  // Kernel from one single-excursion DP per length, independent of the
  // shared-table route used by CompositionModel.
  std::vector<double> log_kt(static_cast<std::size_t>(N) + 1, kNegInf);
  for (int n = 1; n <= N; ++n) {
    log_kt[static_cast<std::size_t>(n)] = log_lambda - 2.0 * n * F + excursion_Z(n, n * params.site_tilt());
  }
  std::vector<double> R(static_cast<std::size_t>(N) + 1, kNegInf);
  R[0] = 0.0;
  for (int j = 1; j <= N; ++j) {
    double acc = kNegInf;
    for (int n = 1; n <= j; ++n) acc = log_add(acc, log_kt[static_cast<std::size_t>(n)] + R[static_cast<std::size_t>(j - n)]);
    R[static_cast<std::size_t>(j)] = acc;
  }
  const double rhs = log_lambda - 2.0 * N * F + partition_function(params);
  return std::fabs(R[static_cast<std::size_t>(N)] - rhs);
}

TiltedWalk tilted_walk_positivity(int N, double sigma, int max_N) {
  if (N < 1) throw ArgumentError("N must be >= 1");
  if (!(sigma >= 0.0)) throw ArgumentError("sigma must be >= 0");
  if (N > max_N) throw CapacityError("tilted walk DP capped at N = " + std::to_string(max_N));
  const int len = 2 * N;
  TiltedWalk out;
  std::vector<double> cur(static_cast<std::size_t>(N) + 2, kNegInf);
  std::vector<double> nxt(cur.size(), kNegInf);
  cur[0] = 0.0;
  for (int k = 1; k <= len; ++k) {
    const double hk = sigma / N * (N - k + 0.5);
    const double lc = log_cosh(hk);
    out.log_normalizer += lc;
    // log of e^{+-h}/(2 cosh h)
    const double log_up = hk - std::log(2.0) - lc;
    const double log_down = -hk - std::log(2.0) - lc;
    std::fill(nxt.begin(), nxt.end(), kNegInf);
    for (int h = k % 2; h <= std::min(k, len - k); h += 2) {
      if (h == 0 && k < len) continue;
      double acc = kNegInf;
      if (h >= 1 && cur[static_cast<std::size_t>(h) - 1] != kNegInf) acc = log_add(acc, cur[static_cast<std::size_t>(h) - 1] + log_up);
      if (cur[static_cast<std::size_t>(h) + 1] != kNegInf) acc = log_add(acc, cur[static_cast<std::size_t>(h) + 1] + log_down);
      nxt[static_cast<std::size_t>(h)] = acc;
    }
    std::swap(cur, nxt);
  }
  out.log_event_probability = cur[0];
  return out;
}

double event_weight_oracle(const ModelParams& params, const std::function<bool(const PathConfig&)>& predicate) {
  params.validate();
  if (params.N > kOracleMaxN) throw CapacityError("enumeration oracle capped at N = " + std::to_string(kOracleMaxN));
  std::vector<double> terms;
  for_each_path(params.N, [&](const PathConfig& p) {
    if (predicate(p)) terms.push_back(log_weight(params, p));
  });
  return log_sum_exp(terms);
}

}  // namespace pinflip
