#include "pinflip/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iterator>
#include <ostream>

#include "pinflip/errors.hpp"
#include "pinflip/format.hpp"

namespace pinflip {

Simulator::Simulator(const ModelParams& params, const PathConfig& initial) : rates_(params) {
  params.validate();
  if (initial.half_length() != params.N) throw ArgumentError("initial path has the wrong length");
  const auto h = initial.heights();
  h_.assign(h.begin(), h.end());
  const int len = 2 * params.N;
  int prev = 0;
  zeros_.insert(0);
  for (int x = 1; x <= len; ++x) {
    A_ += h_[static_cast<std::size_t>(x)];
    if (h_[static_cast<std::size_t>(x)] == 0) {
      if (x < len) ++H_;
      zeros_.insert(x);
      gaps_.insert(x - prev);
      prev = x;
    }
  }
}

int Simulator::L() const { return *std::prev(zeros_.upper_bound(params().N)); }
int Simulator::R() const { return *zeros_.lower_bound(params().N); }

void Simulator::add_zero(int x) {
  const auto next = zeros_.lower_bound(x);
  const int b = *next;
  const int a = *std::prev(next);
  gaps_.erase(gaps_.find(b - a));
  gaps_.insert(x - a);
  gaps_.insert(b - x);
  zeros_.insert(next, x);
  ++H_;
}

void Simulator::remove_zero(int x) {
  const auto it = zeros_.find(x);
  const int a = *std::prev(it);
  const int b = *std::next(it);
  gaps_.erase(gaps_.find(x - a));
  gaps_.erase(gaps_.find(b - x));
  gaps_.insert(b - a);
  zeros_.erase(it);
  --H_;
}

std::optional<int> Simulator::resample(int x, double u) {
  auto& cur = h_[static_cast<std::size_t>(x)];
  const int left = h_[static_cast<std::size_t>(x - 1)];
  if (left != h_[static_cast<std::size_t>(x + 1)]) return std::nullopt;
  const int next = u < rates_.up_probability(left) ? left + 1 : left - 1;
  if (next == cur) return std::nullopt;
  const int old = cur;
  cur = next;
  A_ += next - old;
  if (old == 0) remove_zero(x);
  if (next == 0) add_zero(x);
  return x;
}

std::optional<int> Simulator::step(Philox& rng) {
  const auto sites = static_cast<std::uint64_t>(2 * params().N - 1);
  time_ += exponential(rng, static_cast<double>(sites));
  const int x = static_cast<int>(uniform_index(rng, sites)) + 1;
  return resample(x, uniform01(rng));
}

Trajectory simulate(const ModelParams& params, const PathConfig& initial, double horizon, Philox& rng,
                    const SimulateOptions& options) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ArgumentError("horizon must be finite and >= 0");
  if (options.cadence < 0.0 || !std::isfinite(options.cadence)) throw ArgumentError("cadence must be >= 0");
  Simulator sim(params, initial);
  Trajectory traj{params, 0, initial, {}, {}};
  const int N = params.N;
  auto checkpoint = [&](double t) {
    Checkpoint c{t, sim.H(), sim.A(), sim.l_max(), sim.L(), sim.R(), false};
    if (options.well) c.in_HN = options.well->contains(c.l_max, N);
    traj.checkpoints.push_back(c);
  };
  auto on_change = [&](int x) {
    if (options.record_events) {
      traj.events.push_back({sim.time(), static_cast<std::uint32_t>(x),
                             static_cast<std::uint32_t>(sim.heights()[static_cast<std::size_t>(x)])});
    }
  };
  if (options.cadence > 0.0) {
    checkpoint(0.0);
    for (long k = 1;; ++k) {
      const double t = static_cast<double>(k) * options.cadence;
      if (t > horizon) break;
      sim.run_until(t, rng, on_change);
      checkpoint(t);
    }
  }
  sim.run_until(horizon, rng, on_change);
  traj.final_state = sim.path();
  return traj;
}

void write_checkpoints_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,H,A,l_max,L,R,in_HN\n";
  for (const auto& c : traj.checkpoints) {
    os << format_real(c.t) << ',' << c.H << ',' << c.A << ',' << c.l_max << ',' << c.L << ',' << c.R << ','
       << (c.in_HN ? 1 : 0) << '\n';
  }
}

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

}  // namespace

void write_events_binary(std::ostream& os, const Trajectory& traj) {
  for (const auto& e : traj.events) {
    put_le(os, e.time);
    put_le(os, e.site);
    put_le(os, e.height);
  }
}

std::map<std::uint64_t, double> occupancy(const ModelParams& params, const PathConfig& initial, double horizon,
                                          Philox& rng) {
  if (!(horizon >= 0.0)) throw ArgumentError("horizon must be >= 0");
  Simulator sim(params, initial);
  std::map<std::uint64_t, double> occ;
  std::uint64_t code = initial.code();
  const int len = 2 * params.N;
  double since = 0.0;
  sim.run_until(horizon, rng, [&](int x) {
    occ[code] += sim.time() - since;
    since = sim.time();
    code ^= std::uint64_t{3} << (len - x - 1);
  });
  occ[code] += horizon - since;
  return occ;
}

int grand_coupling_step(std::vector<std::vector<int>>& family, int site, double u, const FlipRates& rates) {
  const auto x = static_cast<std::size_t>(site);
  std::vector<char> ordered(family.size(), 0);
  for (std::size_t i = 0; i + 1 < family.size(); ++i) ordered[i] = family[i][x] <= family[i + 1][x];
  for (auto& h : family) {
    const int left = h[x - 1];
    if (left != h[x + 1]) continue;
    h[x] = u < rates.up_probability(left) ? left + 1 : left - 1;
  }
  int violations = 0;
  for (std::size_t i = 0; i + 1 < family.size(); ++i) {
    if (ordered[i] && family[i][x] > family[i + 1][x]) ++violations;
  }
  return violations;
}

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

CoalescenceEstimate coalescence_mixing_estimate(const ModelParams& params, int replicas, std::uint64_t seed,
                                                double max_time) {
  params.validate();
  if (replicas < 1) throw ArgumentError("replicas must be >= 1");
  const FlipRates rates(params);
  const int N = params.N;
  const auto sites = static_cast<std::uint64_t>(2 * N - 1);
  const PathConfig tent = PathConfig::tent(N);
  const PathConfig zigzag = PathConfig::zigzag(N);
  const auto top = tent.heights();
  const auto bottom = zigzag.heights();

  CoalescenceEstimate est;
  for (int r = 0; r < replicas; ++r) {
    Philox rng(seed, static_cast<std::uint64_t>(r));
    std::vector<std::vector<int>> family{{bottom.begin(), bottom.end()}, {top.begin(), top.end()}};
    int differing = 0;
    for (std::size_t x = 0; x < family[0].size(); ++x) differing += family[0][x] != family[1][x];
    double t = 0.0;
    bool censored = false;
    while (differing > 0) {
      t += exponential(rng, static_cast<double>(sites));
      if (t > max_time) {
        censored = true;
        t = max_time;
        break;
      }
      const int x = static_cast<int>(uniform_index(rng, sites)) + 1;
      const auto ux = static_cast<std::size_t>(x);
      const bool before = family[0][ux] != family[1][ux];
      est.order_violations += static_cast<std::uint64_t>(grand_coupling_step(family, x, uniform01(rng), rates));
      differing += static_cast<int>(family[0][ux] != family[1][ux]) - static_cast<int>(before);
    }
    est.times.push_back(t);
    est.censored += censored ? 1 : 0;
  }
  const double n = static_cast<double>(est.times.size());
  double sum = 0.0;
  for (double t : est.times) sum += t;
  est.mean = sum / n;
  double ss = 0.0;
  for (double t : est.times) ss += (t - est.mean) * (t - est.mean);
  const double se = est.times.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  est.ci_low = est.mean - 1.959963984540054 * se;
  est.ci_high = est.mean + 1.959963984540054 * se;
  est.median = quantile(est.times, 0.5);
  est.q90 = quantile(est.times, 0.9);
  return est;
}

}  // namespace pinflip
