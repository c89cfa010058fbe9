#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pinflip {

// A nonnegative nearest-neighbour bridge of length 2N.
//
// Heights are indexed 0..2N with heights[0] = heights[2N] = 0. Construction
// validates every invariant, so a PathConfig value is always a member of the
// state space.
class PathConfig {
 public:
  explicit PathConfig(std::vector<int> heights);

  // The lowest path (0,1,0,1,...,0) and the highest path x -> min(x, 2N-x).
  static PathConfig zigzag(int half_length);
  static PathConfig tent(int half_length);

  // Up-step bitmask, most significant bit = first increment. Numeric order of
  // codes coincides with the canonical enumeration order.
  static PathConfig from_code(std::uint64_t code, int half_length);
  std::uint64_t code() const;

  // Whitespace-separated heights, e.g. "0 1 2 1 0".
  static PathConfig parse(std::string_view text);
  std::string to_string() const;

  int half_length() const { return static_cast<int>(heights_.size() / 2); }
  int length() const { return static_cast<int>(heights_.size()) - 1; }
  int operator[](int x) const { return heights_[static_cast<std::size_t>(x)]; }
  std::span<const int> heights() const { return heights_; }

  // Coordinatewise partial order.
  bool below(const PathConfig& other) const;

  friend bool operator==(const PathConfig&, const PathConfig&) = default;

 private:
  std::vector<int> heights_;
};

std::ostream& operator<<(std::ostream& os, const PathConfig& path);

// Parameters (N, lambda, sigma). The per-site tilt sigma/N is derived on demand.
struct ModelParams {
  int N = 1;
  double lambda = 1.0;
  double sigma = 0.0;

  // Throws ArgumentError when N < 1, lambda < 0, sigma < 0 or a value is not finite.
  void validate() const;
  double site_tilt() const { return sigma / N; }
};

struct Excursion {
  int start = 0;  // index of the opening zero
  int end = 0;    // index of the closing zero
  int half_length() const { return (end - start) / 2; }
  friend bool operator==(const Excursion&, const Excursion&) = default;
};

struct Landmarks {
  int H = 0;           // contacts at x in 1..2N-1
  std::int64_t A = 0;  // sum of heights over x in 1..2N
  int L = 0;           // last zero at index <= N
  int R = 0;           // first zero at index >= N
  int l_max = 0;       // half-length of the largest excursion
  std::vector<Excursion> excursions;
  friend bool operator==(const Landmarks&, const Landmarks&) = default;
};

Landmarks landmarks(const PathConfig& path);

// Returns the path with the corner at x flipped; unchanged when x is not a
// local extremum or when both neighbours sit on the wall.
PathConfig corner_flip(const PathConfig& path, int x);

// Heat-bath corner-flip rates for fixed parameters. exp(2 sigma / N) is
// computed once at construction.
class FlipRates {
 public:
  explicit FlipRates(const ModelParams& params);

  const ModelParams& params() const { return params_; }

  // Rate of the move path -> corner_flip(path, x).
  double rate(const PathConfig& path, int x) const;
  double rate(std::span<const int> heights, int x) const;

  // Heat-bath probability that site x sits at the higher of its two admissible
  // heights given neighbour height `neighbour` (both neighbours equal). Returns
  // 1 when neighbour == 0 since only height 1 is admissible.
  double up_probability(int neighbour) const {
    if (neighbour == 0) return 1.0;
    return neighbour == 1 ? up_at_wall_ : up_bulk_;
  }

  // Largest total jump rate out of any state: 2N - 1 sites, each rate <= 1.
  double max_total_rate() const { return 2.0 * params_.N - 1.0; }

 private:
  ModelParams params_;
  double tilt2_;        // exp(2 sigma / N)
  double up_bulk_;      // e/(1+e)
  double up_at_wall_;   // e/(lambda+e)
};

// log of 2^{-2N} lambda^H exp(sigma A / N); -inf when lambda = 0 and H > 0.
double log_weight(const ModelParams& params, const PathConfig& path);
double log_weight(const ModelParams& params, int contacts, std::int64_t area);

enum class StaticRegime { kLocalized, kDelocalized, kCritical };

struct RegionMembership {
  bool in_E1 = false;
  bool in_E2 = false;
  bool in_HN = false;
};

// E1 = {l_max <= beta* N} (exact real comparison), E2 its complement; the
// metastable well H_N is E2 unless the regime is delocalized.
// Throws ArgumentError unless 0 < beta_star < 1. Ties and the critical point
// count as localized.
RegionMembership classify_region(const Landmarks& marks, int N, double beta_star, StaticRegime regime);

inline bool in_first_well(int l_max, int N, double beta_star) {
  return static_cast<double>(l_max) <= beta_star * N;
}

inline constexpr int kMaxEnumerationN = 12;

// Visits every path of the state space once, in lexicographic order of the
// increment sequence with down < up. Throws CapacityError above N = 12.
void for_each_path(int N, const std::function<void(const PathConfig&)>& visit);
std::vector<PathConfig> enumerate_paths(int N);

// Sorted up-step codes of the whole state space (same order as enumerate_paths).
std::vector<std::uint64_t> enumerate_codes(int N);

}  // namespace pinflip
