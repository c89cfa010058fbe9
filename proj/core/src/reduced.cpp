#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>

#include "pinflip/errors.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/logmath.hpp"
#include "pinflip/phase.hpp"
#include "pinflip/spectral.hpp"

namespace pinflip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SparseGenerator ReducedChain::as_generator() const {
  std::vector<double> lw(pi_bar.size());
  for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = std::log(pi_bar[i]);
  std::vector<Transition> tr;
  for (Eigen::Index i = 0; i < rates.rows(); ++i) {
    for (Eigen::Index j = 0; j < rates.cols(); ++j) {
      if (i != j && rates(i, j) > 0.0) tr.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), rates(i, j)});
    }
  }
  return SparseGenerator::from_transitions(std::move(lw), tr);
}

double ReducedChain::max_exit_rate() const {
  double q = 0.0;
  for (Eigen::Index i = 0; i < rates.rows(); ++i) q = std::max(q, rates.row(i).sum() - rates(i, i));
  return q;
}

std::optional<std::size_t> ReducedChain::find(std::pair<int, int> key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys.begin());
}

ReducedChain reduce_by_labels(const SparseGenerator& gen, const std::vector<int>& labels,
                              std::vector<std::pair<int, int>> keys) {
  if (labels.size() != gen.size()) throw ArgumentError("one label per state required");
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  ReducedChain r;
  r.pi_bar.assign(static_cast<std::size_t>(k), 0.0);
  r.rates = Eigen::MatrixXd::Zero(k, k);
  const std::vector<double> mu = gen.mu();
  for (std::size_t i = 0; i < mu.size(); ++i) r.pi_bar[static_cast<std::size_t>(labels[i])] += mu[i];
  for (int i = 0; i < k; ++i) {
    if (!(r.pi_bar[static_cast<std::size_t>(i)] > 0.0)) throw StructuralError("empty partition piece");
  }
  if (keys.empty()) {
    for (int i = 0; i < k; ++i) keys.emplace_back(i, 0);
  }
  if (keys.size() != static_cast<std::size_t>(k)) throw ArgumentError("one key per piece required");
  r.keys = std::move(keys);
  const auto rp = gen.row_ptr();
  const auto cols = gen.cols();
  const auto rates = gen.rates();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double out = 0.0;
    for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) {
      const int a = labels[i];
      const int b = labels[cols[e]];
      if (a == b) continue;
      r.rates(a, b) += mu[i] * rates[e];
      out += rates[e];
    }
    r.gamma_bar = std::max(r.gamma_bar, out);
  }
  for (int i = 0; i < k; ++i) r.rates.row(i) /= r.pi_bar[static_cast<std::size_t>(i)];
  r.gamma_exact = true;
  return r;
}

std::vector<std::pair<int, int>> lr_keys(const SparseGenerator& gen) {
  if (!gen.has_paths()) throw ArgumentError("LR keys need a path generator");
  std::vector<std::pair<int, int>> keys(gen.size());
  for (std::size_t i = 0; i < gen.size(); ++i) {
    const Landmarks m = landmarks(gen.state(i));
    keys[i] = {m.L / 2, m.R / 2};
  }
  return keys;
}

std::vector<int> lr_labels(const SparseGenerator& gen, std::vector<std::pair<int, int>>* keys_out) {
  const auto keys = lr_keys(gen);
  std::vector<std::pair<int, int>> distinct = keys;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> labels(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    labels[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), keys[i]) - distinct.begin());
  }
  if (keys_out) *keys_out = distinct;
  return labels;
}

std::vector<int> two_set_labels(const SparseGenerator& gen, double beta_star) {
  if (!gen.has_paths()) throw ArgumentError("two-set labels need a path generator");
  std::vector<int> labels(gen.size());
  for (std::size_t i = 0; i < gen.size(); ++i) {
    labels[i] = in_first_well(landmarks(gen.state(i)).l_max, gen.params().N, beta_star) ? 0 : 1;
  }
  return labels;
}

ReducedChain reduced_lr_chain(const ModelParams& params, bool starred) {
  params.validate();
  const int N = params.N;
  if (N > kReducedLrMaxN) throw CapacityError("DP-based LR reduction capped at N = 60");
  if (N < 2) throw ArgumentError("LR reduction needs N >= 2");
  const CompositionModel model(params);
  const std::vector<double> D = model.pinned_weights(N);
  const double ll = model.log_lambda();
  const double logZ = D.back();
  auto d = [&](int j) { return D[static_cast<std::size_t>(j)]; };
  auto ex = [&](int n) { return model.log_excursion(n); };
  auto left = [&](int a) { return a > 0 ? d(a) + ll : 0.0; };
  auto right = [&](int b) { return b < N ? ll + d(N - b) : 0.0; };

  std::map<std::pair<int, int>, double> logw;
  for (int x = 0; 2 * x < N; ++x) {
    for (int y = N / 2 + 1; y <= N; ++y) {
      if (2 * y <= N) continue;
      const double w = left(x) + ex(y - x) + right(y);
      if (w != kNegInf) logw[{x, y}] = w;
    }
  }
  if (N % 2 == 0) {
    const int c = N / 2;
    const double w = d(c) + ll + d(c);
    if (w != kNegInf) logw[{c, c}] = w;
  }

  ReducedChain r;
  for (const auto& [key, w] : logw) {
    r.keys.push_back(key);
    r.pi_bar.push_back(std::exp(w - logZ));
  }
  const auto k = static_cast<Eigen::Index>(r.keys.size());
  r.rates = Eigen::MatrixXd::Zero(k, k);

  const double e = std::exp(2.0 * params.sigma / N);
  const double log_merge_rate = std::log(e / (params.lambda + e));
  for (int a = 0; 2 * a < N; ++a) {
    for (int b = N / 2 + 1; b <= N; ++b) {
      if (2 * b <= N) continue;
      const auto merged = r.find({a, b});
      if (!merged) continue;
      for (int z = a + 1; z < b; ++z) {
        std::pair<int, int> split_key;
        if (2 * z < N) {
          split_key = {z, b};
        } else if (2 * z == N) {
          split_key = {z, z};
        } else {
          split_key = {a, z};
        }
        if (starred && (std::abs(split_key.first - a) > 1 || std::abs(split_key.second - b) > 1)) continue;
        const auto split = r.find(split_key);
        if (!split) continue;
        const double log_flux = log_merge_rate + left(a) + ex(z - a) + ll + ex(b - z) + right(b) - logZ;
        if (log_flux == kNegInf) continue;
        const auto s = static_cast<Eigen::Index>(*split);
        const auto m = static_cast<Eigen::Index>(*merged);
        r.rates(s, m) += std::exp(log_flux) / r.pi_bar[*split];
        r.rates(m, s) += std::exp(log_flux) / r.pi_bar[*merged];
      }
    }
  }

  // Every state can leave its piece only by merging at L or R, or by splitting
  // the middle excursion at one of its y - x - 1 interior even sites.
  const double up = e / (params.lambda + e);
  const double down = params.lambda / (params.lambda + e);
  for (const auto& [x, y] : r.keys) {
    double bound = 0.0;
    if (x == y) {
      bound = up;
    } else {
      bound = (x > 0 ? up : 0.0) + (y < N ? up : 0.0) + std::max(0, y - x - 1) * down;
    }
    r.gamma_bar = std::max(r.gamma_bar, bound);
  }
  r.gamma_exact = false;
  return r;
}

JerrumReport jerrum_check(const SparseGenerator& gen, const std::vector<int>& labels, const GapOptions& options) {
  JerrumReport rep;
  rep.gap = spectral_gap(gen, options).gap;
  const ReducedChain red = reduce_by_labels(gen, labels);
  rep.pieces = red.pi_bar.size();
  rep.gamma_bar = red.gamma_bar;
  rep.reduced_gap = spectral_gap(red.as_generator(), options).gap;

  std::vector<std::vector<std::size_t>> members(rep.pieces);
  for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
  rep.min_restricted_gap = kInf;
  for (const auto& piece : members) {
    const SparseGenerator sub = gen.restrict_to(piece);
    double g = 0.0;
    if (sub.irreducible()) {
      g = spectral_gap(sub, options).gap;
    } else {
      ++rep.disconnected_pieces;
    }
    rep.min_restricted_gap = std::min(rep.min_restricted_gap, g);
  }

  const double rg = rep.reduced_gap;
  const double mg = rep.min_restricted_gap;
  if (std::isinf(rg)) {
    rep.rhs = mg;
  } else if (std::isinf(mg)) {
    rep.rhs = rg / 3.0;
  } else {
    rep.rhs = std::min(rg / 3.0, rg * mg / (rg + 3.0 * rep.gamma_bar));
  }
  rep.holds = rep.gap >= rep.rhs * (1.0 - 1e-9);
  return rep;
}

namespace {

double cut_ratio(const ReducedChain& c, const std::vector<char>& in) {
  double mass = 0.0;
  double flow = 0.0;
  const auto k = static_cast<Eigen::Index>(c.pi_bar.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!in[static_cast<std::size_t>(i)]) continue;
    mass += c.pi_bar[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!in[static_cast<std::size_t>(j)]) flow += c.pi_bar[static_cast<std::size_t>(i)] * c.rates(i, j);
    }
  }
  const double small = std::min(mass, 1.0 - mass);
  return small > 0.0 ? flow / small : kInf;
}

}  // namespace

CheegerResult cheeger_bound(const ReducedChain& chain, std::size_t max_cuts) {
  const std::size_t k = chain.pi_bar.size();
  CheegerResult res;
  res.chi = kInf;
  if (k < 2) {
    res.bound = kInf;
    res.rigorous = true;
    return res;
  }
  std::vector<char> in(k, 0);
  if (k <= 20) {
    // The last piece stays outside, so each unordered cut is visited once.
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (k - 1)); ++mask) {
      for (std::size_t i = 0; i < k; ++i) in[i] = static_cast<char>((mask >> i) & 1u);
      res.chi = std::min(res.chi, cut_ratio(chain, in));
      ++res.cuts;
    }
    res.rigorous = true;
  } else {
    // Up-sets of the order (x', y') above (x, y) iff x' <= x and y' >= y: for each
    // x the set holds {y >= t(x)} with t nondecreasing in x.
    std::vector<int> xs, ys;
    for (const auto& [x, y] : chain.keys) {
      if (x == y) continue;
      xs.push_back(x);
      ys.push_back(y);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    const int ymin = ys.front();
    const int ymax = ys.back();
    std::vector<int> t(xs.size(), ymin);
    std::function<void(std::size_t, int)> walk = [&](std::size_t col, int lo) {
      if (col == xs.size()) {
        if (++res.cuts > max_cuts) throw CapacityError("Cheeger cut family exceeds " + std::to_string(max_cuts));
        for (std::size_t i = 0; i < k; ++i) {
          const auto [x, y] = chain.keys[i];
          if (x == y) {
            in[i] = 0;
            continue;
          }
          const auto c = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
          in[i] = static_cast<char>(y >= t[c]);
        }
        res.chi = std::min(res.chi, cut_ratio(chain, in));
        return;
      }
      for (int v = lo; v <= ymax + 1; ++v) {
        t[col] = v;
        walk(col + 1, v);
      }
    };
    walk(0, ymin);
    res.rigorous = false;
  }
  res.bound = res.chi * res.chi / (2.0 * std::max(1.0, chain.max_exit_rate()));
  return res;
}

double surrogate_log_weight(const ModelParams& params, int x, int y) {
  const int N = params.N;
  const int n = y - x;
  const double F = free_energy_pinning(params.lambda);
  const double G = n > 0 ? free_energy_area(params.sigma * n / N).G : 0.0;
  const double poly = std::pow(n + 1.0, 3) * params.sigma * params.sigma / (static_cast<double>(N) * N);
  return -2.0 * n * F + 2.0 * n * G - 1.5 * std::log(n + 1.0) + std::log(std::max(poly, 1.0));
}

}  // namespace pinflip
