#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "pinflip/path.hpp"
#include "pinflip/rng.hpp"

namespace pinflip {

// Continuous-time heat-bath dynamics by uniformisation: a global clock of rate
// 2N - 1 picks a site uniformly and resamples it from its conditional law.
// Contacts, area, zero set and excursion lengths are maintained incrementally.
class Simulator {
 public:
  Simulator(const ModelParams& params, const PathConfig& initial);

  const ModelParams& params() const { return rates_.params(); }
  double time() const { return time_; }

  // One clock ring: advances time and resamples a site. Returns the site if the
  // path changed.
  std::optional<int> step(Philox& rng);

  // Applies all clock rings up to time t (the clock is memoryless, so the
  // overshooting ring is discarded) and leaves time() == t.
  template <class OnChange>
  void run_until(double t, Philox& rng, OnChange&& on_change) {
    const double total = 2.0 * params().N - 1.0;
    while (true) {
      const double next = time_ + exponential(rng, total);
      if (next > t) break;
      time_ = next;
      if (auto x = resample(static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(total))) + 1, uniform01(rng))) {
        on_change(*x);
      }
    }
    time_ = t;
  }
  void run_until(double t, Philox& rng) {
    run_until(t, rng, [](int) {});
  }

  // Heat-bath update of site x driven by the uniform u: up iff u < p_up.
  std::optional<int> resample(int x, double u);

  int H() const { return H_; }
  std::int64_t A() const { return A_; }
  int L() const;
  int R() const;
  int l_max() const { return *gaps_.rbegin() / 2; }
  std::span<const int> heights() const { return h_; }
  PathConfig path() const { return PathConfig(h_); }

 private:
  void add_zero(int x);
  void remove_zero(int x);

  FlipRates rates_;
  std::vector<int> h_;
  double time_ = 0.0;
  int H_ = 0;
  std::int64_t A_ = 0;
  std::set<int> zeros_;
  std::multiset<int> gaps_;
};

struct Checkpoint {
  double t = 0.0;
  int H = 0;
  std::int64_t A = 0;
  int l_max = 0;
  int L = 0;
  int R = 0;
  bool in_HN = false;
};

struct FlipEvent {
  double time = 0.0;
  std::uint32_t site = 0;
  std::uint32_t height = 0;
};

// Which well is metastable: E1 = {l_max <= beta N} is the well when the regime
// is delocalized, E2 otherwise.
struct WellSpec {
  double beta_star = 0.5;
  StaticRegime regime = StaticRegime::kLocalized;
  bool contains(int l_max, int N) const {
    const bool e1 = in_first_well(l_max, N, beta_star);
    return regime == StaticRegime::kDelocalized ? e1 : !e1;
  }
};

struct SimulateOptions {
  double cadence = 1.0;  // checkpoint spacing; 0 disables checkpoints
  bool record_events = false;
  std::optional<WellSpec> well;
};

struct Trajectory {
  ModelParams params;
  std::uint64_t seed = 0;
  PathConfig final_state;
  std::vector<Checkpoint> checkpoints;
  std::vector<FlipEvent> events;
};

Trajectory simulate(const ModelParams& params, const PathConfig& initial, double horizon, Philox& rng,
                    const SimulateOptions& options = {});

void write_checkpoints_csv(std::ostream& os, const Trajectory& traj);
// 16-byte little-endian records: f64 time, u32 site, u32 new height.
void write_events_binary(std::ostream& os, const Trajectory& traj);

// Time spent in each configuration (keyed by up-step code) over [0, horizon].
std::map<std::uint64_t, double> occupancy(const ModelParams& params, const PathConfig& initial, double horizon,
                                          Philox& rng);

// Grand coupling: every copy uses the same site and the same uniform and moves
// up iff the uniform is below its own up-probability. Returns the number of
// order violations created at the updated site between consecutive copies that
// were ordered (lower first) before the step.
int grand_coupling_step(std::vector<std::vector<int>>& family, int site, double u, const FlipRates& rates);

struct CoalescenceEstimate {
  std::vector<double> times;  // per replica; censored replicas hold the cap
  std::size_t censored = 0;
  double mean = 0.0;
  double ci_low = 0.0;   // normal 95% interval for the mean
  double ci_high = 0.0;
  double median = 0.0;
  double q90 = 0.0;
  std::uint64_t order_violations = 0;
};

// Coalescence of the tent (highest path) and the zig-zag (lowest path) under
// the grand coupling; replica r uses stream r of the seed.
CoalescenceEstimate coalescence_mixing_estimate(const ModelParams& params, int replicas, std::uint64_t seed,
                                                double max_time = 1e9);

}  // namespace pinflip
