#include "pinflip/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "pinflip/errors.hpp"
#include "pinflip/logmath.hpp"

namespace pinflip {

namespace {

void check_site(const PathConfig& path, int x) {
  if (x < 1 || x > path.length() - 1) {
    throw ArgumentError("site index " + std::to_string(x) + " outside 1.." + std::to_string(path.length() - 1));
  }
}

}  // namespace

PathConfig::PathConfig(std::vector<int> heights) : heights_(std::move(heights)) {
  const std::size_t n = heights_.size();
  if (n < 3 || n % 2 == 0) throw ArgumentError("path must have 2N+1 heights with N >= 1");
  if (heights_.front() != 0 || heights_.back() != 0) throw ArgumentError("path must start and end at 0");
  for (std::size_t x = 1; x < n; ++x) {
    if (heights_[x] < 0) throw ArgumentError("negative height at index " + std::to_string(x));
    if (std::abs(heights_[x] - heights_[x - 1]) != 1) {
      throw ArgumentError("non-unit increment at index " + std::to_string(x));
    }
  }
}

PathConfig PathConfig::zigzag(int half_length) {
  if (half_length < 1) throw ArgumentError("N must be >= 1");
  std::vector<int> h(2 * static_cast<std::size_t>(half_length) + 1);
  for (std::size_t x = 0; x < h.size(); ++x) h[x] = static_cast<int>(x % 2);
  return PathConfig(std::move(h));
}

PathConfig PathConfig::tent(int half_length) {
  if (half_length < 1) throw ArgumentError("N must be >= 1");
  const int len = 2 * half_length;
  std::vector<int> h(static_cast<std::size_t>(len) + 1);
  for (int x = 0; x <= len; ++x) h[static_cast<std::size_t>(x)] = std::min(x, len - x);
  return PathConfig(std::move(h));
}

PathConfig PathConfig::from_code(std::uint64_t code, int half_length) {
  if (half_length < 1 || half_length > 31) throw ArgumentError("code form supports 1 <= N <= 31");
  const int len = 2 * half_length;
  std::vector<int> h(static_cast<std::size_t>(len) + 1, 0);
  for (int x = 1; x <= len; ++x) {
    const bool up = (code >> (len - x)) & 1u;
    h[static_cast<std::size_t>(x)] = h[static_cast<std::size_t>(x - 1)] + (up ? 1 : -1);
  }
  return PathConfig(std::move(h));
}

std::uint64_t PathConfig::code() const {
  const int len = length();
  if (len > 62) throw CapacityError("code form supports N <= 31");
  std::uint64_t c = 0;
  for (int x = 1; x <= len; ++x) {
    c = (c << 1) | (heights_[static_cast<std::size_t>(x)] > heights_[static_cast<std::size_t>(x - 1)] ? 1u : 0u);
  }
  return c;
}

PathConfig PathConfig::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<int> h;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(token, &used);
    } catch (const std::exception&) {
      throw ArgumentError("bad height token '" + token + "'");
    }
    if (used != token.size()) throw ArgumentError("bad height token '" + token + "'");
    h.push_back(v);
  }
  return PathConfig(std::move(h));
}

std::string PathConfig::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < heights_.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(heights_[i]);
  }
  return out;
}

bool PathConfig::below(const PathConfig& other) const {
  if (other.heights_.size() != heights_.size()) return false;
  for (std::size_t i = 0; i < heights_.size(); ++i) {
    if (heights_[i] > other.heights_[i]) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const PathConfig& path) { return os << path.to_string(); }

void ModelParams::validate() const {
  if (N < 1) throw ArgumentError("N must be >= 1");
  if (!std::isfinite(lambda) || lambda < 0.0) throw ArgumentError("lambda must be finite and >= 0");
  if (!std::isfinite(sigma) || sigma < 0.0) throw ArgumentError("sigma must be finite and >= 0");
}

Landmarks landmarks(const PathConfig& path) {
  Landmarks m;
  const int len = path.length();
  const int N = path.half_length();
  int prev_zero = 0;
  m.L = 0;
  m.R = len;
  for (int x = 1; x <= len; ++x) {
    const int h = path[x];
    m.A += h;
    if (h != 0) continue;
    if (x < len) ++m.H;
    if (x <= N) m.L = x;
    m.excursions.push_back({prev_zero, x});
    m.l_max = std::max(m.l_max, (x - prev_zero) / 2);
    prev_zero = x;
  }
  for (int x = N; x <= len; ++x) {
    if (path[x] == 0) {
      m.R = x;
      break;
    }
  }
  return m;
}

PathConfig corner_flip(const PathConfig& path, int x) {
  check_site(path, x);
  const int left = path[x - 1];
  const int right = path[x + 1];
  if (left != right || left == 0) return path;
  std::vector<int> h(path.heights().begin(), path.heights().end());
  h[static_cast<std::size_t>(x)] = path[x] > left ? left - 1 : left + 1;
  return PathConfig(std::move(h));
}

FlipRates::FlipRates(const ModelParams& params) : params_(params) {
  params_.validate();
  tilt2_ = std::exp(2.0 * params_.sigma / params_.N);
  up_bulk_ = tilt2_ / (1.0 + tilt2_);
  up_at_wall_ = tilt2_ / (params_.lambda + tilt2_);
}

double FlipRates::rate(const PathConfig& path, int x) const {
  check_site(path, x);
  return rate(path.heights(), x);
}

double FlipRates::rate(std::span<const int> h, int x) const {
  const auto i = static_cast<std::size_t>(x);
  const int left = h[i - 1];
  const int right = h[i + 1];
  const int mid = h[i];
  if (left != right || left == 0) return 0.0;
  if (left == 1) {
    // (1,0,1) rises to (1,2,1); (1,2,1) drops onto the wall.
    return mid == 0 ? tilt2_ / (params_.lambda + tilt2_) : params_.lambda / (params_.lambda + tilt2_);
  }
  return mid < left ? tilt2_ / (1.0 + tilt2_) : 1.0 / (1.0 + tilt2_);
}

double log_weight(const ModelParams& params, int contacts, std::int64_t area) {
  double lw = -2.0 * params.N * std::log(2.0) + params.site_tilt() * static_cast<double>(area);
  if (contacts > 0) {
    if (params.lambda == 0.0) return kNegInf;
    lw += contacts * std::log(params.lambda);
  }
  return lw;
}

double log_weight(const ModelParams& params, const PathConfig& path) {
  const Landmarks m = landmarks(path);
  return log_weight(params, m.H, m.A);
}

RegionMembership classify_region(const Landmarks& marks, int N, double beta_star, StaticRegime regime) {
  if (!(beta_star > 0.0 && beta_star < 1.0)) throw ArgumentError("beta_star must lie in (0,1)");
  RegionMembership r;
  r.in_E1 = in_first_well(marks.l_max, N, beta_star);
  r.in_E2 = !r.in_E1;
  r.in_HN = regime == StaticRegime::kDelocalized ? r.in_E1 : r.in_E2;
  return r;
}

namespace {

// Depth-first walk over increments, down before up.
void walk_codes(int len, int x, int h, std::uint64_t code, std::vector<std::uint64_t>& out) {
  if (x == len) {
    if (h == 0) out.push_back(code);
    return;
  }
  const int remaining = len - x;
  if (h > 0) walk_codes(len, x + 1, h - 1, code << 1, out);
  if (h + 1 <= remaining - 1) walk_codes(len, x + 1, h + 1, (code << 1) | 1u, out);
}

}  // namespace

std::vector<std::uint64_t> enumerate_codes(int N) {
  if (N < 1) throw ArgumentError("N must be >= 1");
  if (N > kMaxEnumerationN) {
    throw CapacityError("enumeration capped at N = " + std::to_string(kMaxEnumerationN));
  }
  std::vector<std::uint64_t> codes;
  codes.reserve(catalan(N));
  walk_codes(2 * N, 0, 0, 0, codes);
  return codes;
}

void for_each_path(int N, const std::function<void(const PathConfig&)>& visit) {
  for (std::uint64_t c : enumerate_codes(N)) visit(PathConfig::from_code(c, N));
}

std::vector<PathConfig> enumerate_paths(int N) {
  std::vector<PathConfig> out;
  for_each_path(N, [&](const PathConfig& p) { out.push_back(p); });
  return out;
}

}  // namespace pinflip
