#include "pinflip/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pinflip/errors.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/logmath.hpp"

namespace pinflip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Flipping the corner at x swaps the increments of steps x and x+1.
std::uint64_t flip_code(std::uint64_t code, int len, int x) {
  return code ^ ((std::uint64_t{3}) << (len - x - 1));
}

}  // namespace

SparseGenerator SparseGenerator::build(const ModelParams& params, const GeneratorOptions& options) {
  params.validate();
  const int N = params.N;
  const int len = 2 * N;
  if (N > kMaxEnumerationN) throw CapacityError("generator needs enumeration, capped at N = 12");
  SparseGenerator g;
  g.params_ = params;

  std::vector<double> lw;
  for (std::uint64_t c : enumerate_codes(N)) {
    const PathConfig p = PathConfig::from_code(c, N);
    const double w = log_weight(params, p);
    if (w == kNegInf) continue;
    if (options.subset && !options.subset(p)) continue;
    g.codes_.push_back(c);
    lw.push_back(w);
  }
  if (g.codes_.empty()) throw StructuralError("state set is empty");
  if (g.codes_.size() > options.max_states) {
    throw CapacityError("state set of " + std::to_string(g.codes_.size()) + " exceeds cap " +
                        std::to_string(options.max_states));
  }

  std::vector<int> Ls, Rs;
  if (options.starred) {
    Ls.reserve(g.codes_.size());
    Rs.reserve(g.codes_.size());
    for (std::uint64_t c : g.codes_) {
      const Landmarks m = landmarks(PathConfig::from_code(c, N));
      Ls.push_back(m.L);
      Rs.push_back(m.R);
    }
  }

  const FlipRates rates(params);
  std::vector<Transition> tr;
  std::vector<int> h(static_cast<std::size_t>(len) + 1);
  for (std::size_t i = 0; i < g.codes_.size(); ++i) {
    const std::uint64_t c = g.codes_[i];
    h[0] = 0;
    for (int x = 1; x <= len; ++x) {
      h[static_cast<std::size_t>(x)] = h[static_cast<std::size_t>(x) - 1] + (((c >> (len - x)) & 1u) ? 1 : -1);
    }
    for (int x = 1; x < len; ++x) {
      const double r = rates.rate(h, x);
      if (r <= 0.0) continue;
      const auto j = g.find(flip_code(c, len, x));
      if (!j) continue;
      if (options.starred && (std::abs(Ls[i] - Ls[*j]) > 2 || std::abs(Rs[i] - Rs[*j]) > 2)) continue;
      tr.push_back({i, *j, r});
    }
  }
  const double lz = log_sum_exp(lw);
  for (double& w : lw) w -= lz;
  g.log_mu_ = std::move(lw);
  g.finalize(tr);
  return g;
}

SparseGenerator SparseGenerator::from_transitions(std::vector<double> log_weights,
                                                  const std::vector<Transition>& transitions) {
  if (log_weights.empty()) throw StructuralError("state set is empty");
  SparseGenerator g;
  const double lz = log_sum_exp(log_weights);
  for (double& w : log_weights) w -= lz;
  g.log_mu_ = std::move(log_weights);
  std::vector<Transition> tr;
  for (const Transition& t : transitions) {
    if (t.from >= g.log_mu_.size() || t.to >= g.log_mu_.size()) throw ArgumentError("transition index out of range");
    if (t.rate > 0.0 && t.from != t.to) tr.push_back(t);
  }
  g.finalize(tr);
  return g;
}

void SparseGenerator::finalize(const std::vector<Transition>& transitions) {
  std::vector<Transition> tr = transitions;
  std::sort(tr.begin(), tr.end(), [](const Transition& a, const Transition& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  const std::size_t n = log_mu_.size();
  row_ptr_.assign(n + 1, 0);
  cols_.clear();
  rates_.clear();
  sym_.clear();
  exit_.assign(n, 0.0);
  for (const Transition& t : tr) {
    ++row_ptr_[t.from + 1];
    cols_.push_back(t.to);
    rates_.push_back(t.rate);
    sym_.push_back(std::exp(0.5 * (log_mu_[t.from] - log_mu_[t.to])) * t.rate);
    exit_[t.from] += t.rate;
  }
  std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
}

std::optional<std::size_t> SparseGenerator::find(std::uint64_t code) const {
  auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code) return std::nullopt;
  return static_cast<std::size_t>(it - codes_.begin());
}

std::vector<double> SparseGenerator::mu() const {
  std::vector<double> m(log_mu_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(log_mu_[i]);
  return m;
}

double SparseGenerator::reversibility_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = cols_[k];
      const auto b = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j]);
      const auto e = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j + 1]);
      const auto it = std::lower_bound(b, e, i);
      if (it == e || *it != i) return kInf;
      const double back = rates_[static_cast<std::size_t>(it - cols_.begin())];
      const double lhs = log_mu_[i] + std::log(rates_[k]);
      const double rhs = log_mu_[j] + std::log(back);
      worst = std::max(worst, std::fabs(std::expm1(lhs - rhs)));
    }
  }
  return worst;
}

bool SparseGenerator::irreducible() const {
  const std::size_t n = size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (!seen[cols_[k]]) {
        seen[cols_[k]] = 1;
        ++count;
        stack.push_back(cols_[k]);
      }
    }
  }
  return count == n;
}

Eigen::MatrixXd SparseGenerator::dense_symmetric() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < size(); ++i) {
    A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = exit_[i];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols_[k])) = -sym_[k];
    }
  }
  // Remove rounding asymmetry between the two triangle halves.
  return 0.5 * (A + A.transpose());
}

void SparseGenerator::apply_symmetric(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  const std::size_t n = size();
  out.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = exit_[i] * in[static_cast<Eigen::Index>(i)];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      acc -= sym_[k] * in[static_cast<Eigen::Index>(cols_[k])];
    }
    out[static_cast<Eigen::Index>(i)] = acc;
  }
}

SparseGenerator SparseGenerator::restrict_to(const std::vector<std::size_t>& states) const {
  if (states.empty()) throw StructuralError("restricted state set is empty");
  std::vector<std::size_t> pos(size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t k = 0; k < states.size(); ++k) pos[states[k]] = k;
  std::vector<double> lw;
  lw.reserve(states.size());
  std::vector<Transition> tr;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::size_t i = states[k];
    lw.push_back(log_mu_[i]);
    for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
      const std::size_t j = pos[cols_[e]];
      if (j != std::numeric_limits<std::size_t>::max()) tr.push_back({k, j, rates_[e]});
    }
  }
  SparseGenerator g = from_transitions(std::move(lw), tr);
  g.params_ = params_;
  if (!codes_.empty()) {
    for (std::size_t i : states) g.codes_.push_back(codes_[i]);
  }
  return g;
}

GapResult spectral_gap(const SparseGenerator& gen, const GapOptions& options) {
  GapResult out;
  const std::size_t n = gen.size();
  if (n == 1) {
    out.gap = kInf;
    out.method = "trivial";
    return out;
  }
  if (!gen.irreducible()) throw StructuralError("generator is not irreducible");
  Eigen::VectorXd sqrt_mu(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) sqrt_mu[static_cast<Eigen::Index>(i)] = std::exp(0.5 * gen.log_mu()[i]);

  Eigen::VectorXd v;
  if (n <= options.dense_max) {
    const Eigen::MatrixXd A = gen.dense_symmetric();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", kInf);
    out.gap = es.eigenvalues()[1];
    v = es.eigenvectors().col(1);
    out.residual = (A * v - out.gap * v).norm();
    out.method = "dense";
  } else {
    auto op = [&gen](const Eigen::VectorXd& in, Eigen::VectorXd& o) { gen.apply_symmetric(in, o); };
    const LanczosResult r = lanczos_smallest(op, n, sqrt_mu, options);
    out.gap = r.value;
    out.residual = r.residual;
    out.iterations = r.iterations;
    out.method = "lanczos";
    v = r.vector;
  }
  if (options.want_vector) {
    out.eigenfunction.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.eigenfunction[i] = v[static_cast<Eigen::Index>(i)] / sqrt_mu[static_cast<Eigen::Index>(i)];
    }
  }
  return out;
}

Rayleigh dirichlet_rayleigh(const SparseGenerator& gen, std::span<const double> f) {
  if (f.size() != gen.size()) throw ArgumentError("test function has the wrong length");
  const std::vector<double> mu = gen.mu();
  double fmax = 0.0;
  bool constant = true;
  for (std::size_t i = 0; i < f.size(); ++i) {
    fmax = std::max(fmax, std::fabs(f[i]));
    if (f[i] != f[0]) constant = false;
  }
  if (constant) throw DegenerateInputError("test function is constant");
  double mean = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) mean += mu[i] * f[i];
  Rayleigh r;
  for (std::size_t i = 0; i < f.size(); ++i) r.variance += mu[i] * (f[i] - mean) * (f[i] - mean);
  const auto rp = gen.row_ptr();
  const auto cols = gen.cols();
  const auto rates = gen.rates();
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const double d = f[cols[k]] - f[i];
      r.dirichlet += 0.5 * mu[i] * rates[k] * d * d;
    }
  }
  if (!(r.variance > 1e-24 * fmax * fmax)) throw DegenerateInputError("test function has zero variance");
  r.quotient = r.dirichlet / r.variance;
  return r;
}

std::vector<double> area_test_function(const SparseGenerator& gen, double a) {
  if (!gen.has_paths()) throw ArgumentError("area test function needs a path generator");
  std::vector<double> f(gen.size());
  const int N = gen.params().N;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = std::exp(a * static_cast<double>(landmarks(gen.state(i)).A) / N);
  }
  return f;
}

AreaTestMoments area_test_moments(const ModelParams& params, double a) {
  if (params.sigma + 2.0 * a < 0.0) throw ArgumentError("sigma + 2a must be >= 0");
  auto logZ = [&](double s) { return partition_function(ModelParams{params.N, params.lambda, s}); };
  const double l0 = logZ(params.sigma);
  AreaTestMoments m;
  m.log_mean = logZ(params.sigma + a) - l0;
  m.variance = std::exp(logZ(params.sigma + 2.0 * a) - l0) - std::exp(2.0 * m.log_mean);
  return m;
}

BottleneckBound bottleneck_bound(const ModelParams& params, double beta_star) {
  const EventWeights w = event_weights(params, beta_star);
  BottleneckBound b;
  b.threshold = w.threshold;
  b.degenerate = w.degenerate;
  if (w.logZ_boundary == kNegInf) {
    b.degenerate = true;
    b.t_rel_lower = kInf;
    b.log_t_rel_lower = kInf;
    return b;
  }
  b.log_t_rel_lower = w.logZ_E1 + w.logZ_E2 - std::log(2.0 * params.N) - w.logZ_boundary - w.logZ;
  b.t_rel_lower = std::exp(b.log_t_rel_lower);
  return b;
}

double star_chain_gap(const ModelParams& params, const GapOptions& options) {
  GeneratorOptions go;
  go.starred = true;
  return spectral_gap(SparseGenerator::build(params, go), options).gap;
}

double lr_piece_product_gap(const ModelParams& params, int x, int y) {
  const int N = params.N;
  if (x < 0 || y > N || x > y) throw ArgumentError("piece (x, y) needs 0 <= x <= y <= N");
  auto factor = [&](int n, double lambda) {
    if (n <= 1) return kInf;
    const ModelParams p{n, lambda, params.sigma * n / N};
    return spectral_gap(SparseGenerator::build(p)).gap;
  };
  return std::min({factor(x, params.lambda), factor(N - y, params.lambda), factor(y - x, 0.0)});
}

namespace {

struct SpectralForm {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<double> mu;
};

SpectralForm spectral_form(const SparseGenerator& gen) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gen.dense_symmetric());
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", kInf);
  return {es.eigenvalues(), es.eigenvectors(), gen.mu()};
}

// P_t(i, .) = sqrt(mu_j / mu_i) sum_k V_ik V_jk e^{-t lambda_k}
Eigen::MatrixXd heat_kernel(const SpectralForm& s, double t) {
  const Eigen::VectorXd decay = (-t * s.values.array()).exp();
  Eigen::MatrixXd P = s.vectors * decay.asDiagonal() * s.vectors.transpose();
  const auto n = P.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      P(i, j) *= std::sqrt(s.mu[static_cast<std::size_t>(j)] / s.mu[static_cast<std::size_t>(i)]);
    }
  }
  return P;
}

double worst_tv(const SpectralForm& s, double t) {
  const Eigen::MatrixXd P = heat_kernel(s, t);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    double tv = 0.0;
    for (Eigen::Index j = 0; j < P.cols(); ++j) tv += std::fabs(P(i, j) - s.mu[static_cast<std::size_t>(j)]);
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

}  // namespace

double tv_distance_at(const ModelParams& params, double t) {
  if (params.N > kMixingMaxN) throw CapacityError("exact mixing capped at N = 6");
  return worst_tv(spectral_form(SparseGenerator::build(params)), t);
}

MixingResult tv_mixing_exact(const ModelParams& params, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon must lie in (0,1)");
  if (params.N > kMixingMaxN) throw CapacityError("exact mixing capped at N = 6");
  const SparseGenerator gen = SparseGenerator::build(params);
  const SpectralForm s = spectral_form(gen);
  MixingResult r;
  r.mu_min = *std::min_element(s.mu.begin(), s.mu.end());
  if (gen.size() == 1) {
    r.t_rel = 0.0;
    return r;
  }
  r.t_rel = 1.0 / s.values[1];
  r.lower = r.t_rel * std::log(1.0 / (2.0 * epsilon));
  r.upper = r.t_rel * std::log(1.0 / (epsilon * r.mu_min));
  if (worst_tv(s, 0.0) <= epsilon) return r;
  double lo = 0.0;
  double hi = r.t_rel;
  while (worst_tv(s, hi) > epsilon) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (worst_tv(s, mid) > epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.t_mix = hi;
  return r;
}

std::vector<double> transition_row(const SparseGenerator& gen, std::size_t start, double t) {
  if (start >= gen.size()) throw ArgumentError("start state out of range");
  if (gen.size() > 3000) throw CapacityError("dense heat kernel capped at 3000 states");
  const SpectralForm s = spectral_form(gen);
  const Eigen::MatrixXd P = heat_kernel(s, t);
  std::vector<double> row(gen.size());
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = P(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(j));
  return row;
}

}  // namespace pinflip
