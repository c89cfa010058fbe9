#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace pinflip {

__extension__ using uint128 = unsigned __int128;

// Philox4x32-10 counter-based generator.
// 
// A generator is identified by a 64-bit seed and a 64-bit stream id; the pair
// forms the key, so replica r of an experiment seeded with s always draws the
// same numbers no matter how replicas are scheduled across threads.
class Philox {
 public:
  using result_type = std::uint64_t;

  Philox(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (buffered_ == 0) refill();
    const std::size_t i = 2 - buffered_;
    --buffered_;
    return (static_cast<std::uint64_t>(block_[2 * i]) << 32) | block_[2 * i + 1];
  }

  // A child stream derived from this generator's key; used to fan out replicas.
  Philox split(std::uint64_t stream) const {
    Philox child(0, stream);
    child.key_ = key_;
    return child;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  void refill() {
    std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(counter_),
                                     static_cast<std::uint32_t>(counter_ >> 32),
                                     static_cast<std::uint32_t>(stream_),
                                     static_cast<std::uint32_t>(stream_ >> 32)};
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    block_ = ctr;
    ++counter_;
    buffered_ = 2;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  std::size_t buffered_ = 0;
};

// Uniform double in [0, 1) with 53 random bits.
template <class Engine>
double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exponential variate with the given rate.
template <class Engine>
double exponential(Engine& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

// Uniform integer in [0, n).
template <class Engine>
std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
  // Lemire's nearly divisionless method.
  uint128 m = static_cast<uint128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<uint128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace pinflip
